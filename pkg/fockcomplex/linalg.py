"""
Linear algebra helpers.
Exact kernels and block solves over Gaussian rationals through sympy's
DomainMatrix; scipy for the hermitian float problems (eigenvalues, Galerkin systems).
"""

import logging
from typing import Any, Dict, Hashable, List, Optional, Sequence

import numpy as np
from scipy import linalg
from sympy import QQ_I
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from .scalars import GaussRational, qqi

logger = logging.getLogger(__name__)

Row = List[GaussRational]


def nullspace(m: List[Row], n_cols: int) -> List[Row]:
    """Exact basis of {x : m x = 0}"""
    if not m:
        return [[qqi(1) if i == c else qqi(0) for i in range(n_cols)] for c in range(n_cols)]
    basis = DomainMatrix(m, (len(m), n_cols), QQ_I).nullspace()
    return basis.to_list()


def solve_exact(m: List[Row], t: Row) -> Optional[Row]:
    """The solution of the square system m x = t, None if m is singular"""
    size = len(t)
    matrix = DomainMatrix(m, (size, size), QQ_I)
    rhs = DomainMatrix([[value] for value in t], (size, 1), QQ_I)
    try:
        solution = matrix.lu_solve(rhs)
    except DMNonInvertibleMatrixError:
        logger.debug(f"Exact {size}x{size} block is singular")
        return None
    return [row[0] for row in solution.to_list()]


def sparse_columns_to_rows(columns: Sequence[Dict[Hashable, GaussRational]]) -> List[Row]:
    """Dense exact rows from sparse columns; row order follows the sorted union of keys"""
    keys = sorted({key for column in columns for key in column})
    return [[column.get(key, qqi(0)) for column in columns] for key in keys]


def smallest_eigenvalue(matrix: Any) -> float:
    """Smallest eigenvalue of a hermitian matrix"""
    dense = np.asarray(matrix.toarray() if hasattr(matrix, "toarray") else matrix)
    if not dense.size:
        raise ValueError("empty matrix has no eigenvalues")
    value = linalg.eigvalsh(dense, subset_by_index=[0, 0])[0]
    logger.debug(f"Smallest eigenvalue of {dense.shape[0]}x{dense.shape[0]} form: {value:.12g}")
    return float(value)


def hermitian_eigenvalues(matrix: Any) -> np.ndarray:
    dense = np.asarray(matrix.toarray() if hasattr(matrix, "toarray") else matrix)
    return linalg.eigvalsh(dense)


def hermitian_solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a hermitian positive definite system"""
    return linalg.solve(matrix, rhs, assume_a="pos")
