"""
Feature assembly and the linear classifier.

Each representation contributes one block of binary presence columns; the
blocks are concatenated in representation order into a single sparse design
matrix on which an L2-regularized multinomial logistic regression is trained.
"""
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize, sparse
from scipy.special import logsumexp

from mrsqm.core.config import settings
from mrsqm.core.errors import ArgumentError, NotFittedError
from mrsqm.schemas.mining import FeatureSet
from mrsqm.schemas.model import ClassifierWeights, FeatureMatrix
from mrsqm.schemas.symbolic import SymbolicSequence
from mrsqm.services.feature_miner import document_presence

logger = logging.getLogger(__name__)

MatrixLike = Union[FeatureMatrix, sparse.spmatrix, np.ndarray]


def featurize(
    sequences_per_rep: Sequence[Sequence[SymbolicSequence]],
    feature_sets: Sequence[FeatureSet],
) -> FeatureMatrix:
    """
    Binary presence matrix over the concatenated feature space.

    Args:
        sequences_per_rep: For each representation, one sequence per series
        feature_sets: For each representation, its selected subwords

    Returns:
        FeatureMatrix with columns in representation order, then subword order
    """
    if len(sequences_per_rep) != len(feature_sets):
        raise ArgumentError(
            f"{len(sequences_per_rep)} sequence lists for {len(feature_sets)} feature sets"
        )
    if not feature_sets:
        raise ArgumentError("At least one representation is required")

    n_rows = len(sequences_per_rep[0])
    blocks = []
    offsets = []
    offset = 0
    for r, (sequences, features) in enumerate(zip(sequences_per_rep, feature_sets)):
        if len(sequences) != n_rows:
            raise ArgumentError(
                f"Representation {r} has {len(sequences)} sequences, expected {n_rows}"
            )
        offsets.append(offset)
        offset += len(features)
        if len(features):
            presence = document_presence(sequences, features.subwords)
            blocks.append(sparse.csr_matrix(presence, dtype=np.float64))

    if blocks:
        data = sparse.hstack(blocks, format="csr", dtype=np.float64)
    else:
        data = sparse.csr_matrix((n_rows, 0), dtype=np.float64)
    return FeatureMatrix(data=data, offsets=offsets)


def _as_matrix(X: MatrixLike):
    if isinstance(X, FeatureMatrix):
        return X.data
    if sparse.issparse(X):
        return X.tocsr()
    return np.asarray(X, dtype=np.float64)


def objective_and_gradient(
    W: np.ndarray, b: np.ndarray, X: MatrixLike, y: np.ndarray, reg_strength: float
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Regularized multinomial negative log-likelihood and its gradient.

    f(W, b) = sum_i -log softmax(W x_i + b)[y_i] + ||W||^2 / (2 * reg_strength)

    Args:
        W: C x D weights
        b: C intercepts (not regularized)
        X: N x D design matrix, dense or sparse
        y: N integer class codes
        reg_strength: Inverse L2 penalty, > 0

    Returns:
        (value, gradient w.r.t. W, gradient w.r.t. b)
    """
    X = _as_matrix(X)
    y = np.asarray(y, dtype=np.int64)
    rows = np.arange(y.size)

    scores = np.asarray(X @ W.T) + b
    log_prob = scores - logsumexp(scores, axis=1, keepdims=True)
    value = -log_prob[rows, y].sum() + 0.5 * np.sum(W * W) / reg_strength

    residual = np.exp(log_prob)
    residual[rows, y] -= 1.0
    grad_W = np.asarray(X.T @ residual).T + W / reg_strength
    grad_b = residual.sum(axis=0)
    return float(value), grad_W, grad_b


class SoftmaxRegression:
    """
    L2-regularized multinomial logistic regression fitted with L-BFGS-B.

    Fitting is a deterministic batch method: it stops once the gradient
    infinity-norm drops below tol or after max_iter iterations, and records
    the objective after every iteration in objective_history_.
    """

    def __init__(
        self,
        reg_strength: float = settings.REG_STRENGTH,
        tol: float = settings.TOL,
        max_iter: int = settings.MAX_ITER,
    ):
        if reg_strength <= 0:
            raise ArgumentError(f"reg_strength must be positive, got {reg_strength}")
        self.reg_strength = reg_strength
        self.tol = tol
        self.max_iter = max_iter

        self.coef_: Optional[np.ndarray] = None
        self.intercept_: Optional[np.ndarray] = None
        self.converged_ = False
        self.n_iter_ = 0
        self.objective_history_: List[float] = []

    @classmethod
    def from_weights(cls, weights: ClassifierWeights) -> "SoftmaxRegression":
        estimator = cls()
        estimator.coef_ = np.asarray(weights.coef, dtype=np.float64)
        estimator.intercept_ = np.asarray(weights.intercept, dtype=np.float64)
        estimator.converged_ = weights.converged
        estimator.n_iter_ = weights.n_iter
        estimator.objective_history_ = list(weights.objective_history)
        return estimator

    def to_weights(self) -> ClassifierWeights:
        self._check_fitted()
        return ClassifierWeights(
            coef=self.coef_,
            intercept=self.intercept_,
            converged=self.converged_,
            n_iter=self.n_iter_,
            objective_history=self.objective_history_,
        )

    def fit(self, X: MatrixLike, y: Sequence[int], n_classes: Optional[int] = None) -> "SoftmaxRegression":
        X = _as_matrix(X)
        y = np.asarray(y, dtype=np.int64)
        if X.shape[0] != y.size:
            raise ArgumentError(f"{X.shape[0]} rows for {y.size} labels")
        if X.shape[0] == 0:
            raise ArgumentError("Cannot train on an empty design matrix")
        if np.unique(y).size < 2:
            raise ArgumentError("Training needs at least 2 classes")
        C = int(n_classes) if n_classes is not None else int(y.max()) + 1
        D = X.shape[1]

        def fun(theta: np.ndarray) -> Tuple[float, np.ndarray]:
            W, b = theta[: C * D].reshape(C, D), theta[C * D:]
            value, grad_W, grad_b = objective_and_gradient(W, b, X, y, self.reg_strength)
            return value, np.concatenate((grad_W.ravel(), grad_b))

        theta = np.zeros(C * (D + 1))
        value, grad = fun(theta)
        history = [value]

        def record(intermediate_result):
            history.append(float(intermediate_result.fun))

        n_iter = 0
        # L-BFGS-B can stop early on a line search failure; restart while it still makes progress
        while np.abs(grad).max() >= self.tol and n_iter < self.max_iter:
            result = optimize.minimize(
                fun,
                theta,
                method="L-BFGS-B",
                jac=True,
                callback=record,
                options={
                    "maxiter": self.max_iter - n_iter,
                    "gtol": self.tol,
                    "ftol": np.finfo(np.float64).eps,
                },
            )
            n_iter += max(int(result.nit), 1)
            if result.fun > value or (result.fun == value and result.nit == 0):
                break
            theta = result.x
            value, grad = fun(theta)

        self.coef_ = theta[: C * D].reshape(C, D).copy()
        self.intercept_ = theta[C * D:].copy()
        self.n_iter_ = n_iter
        self.objective_history_ = history
        self.converged_ = bool(np.abs(grad).max() < self.tol)
        if self.converged_:
            logger.info(f"Classifier converged in {n_iter} iterations, objective {value:.6f}")
        else:
            logger.warning(
                f"Classifier did not converge after {n_iter} iterations "
                f"(gradient norm {np.abs(grad).max():.3g} >= tol {self.tol:g})"
            )
        return self

    def _check_fitted(self) -> None:
        if self.coef_ is None:
            raise NotFittedError("SoftmaxRegression is not fitted")

    def decision_function(self, X: MatrixLike) -> np.ndarray:
        self._check_fitted()
        X = _as_matrix(X)
        if X.shape[1] != self.coef_.shape[1]:
            raise ArgumentError(f"Expected {self.coef_.shape[1]} features, got {X.shape[1]}")
        return np.asarray(X @ self.coef_.T) + self.intercept_

    def predict_proba(self, X: MatrixLike) -> np.ndarray:
        scores = self.decision_function(X)
        return np.exp(scores - logsumexp(scores, axis=1, keepdims=True))

    def predict(self, X: MatrixLike) -> np.ndarray:
        # argmax keeps the lowest class index on ties
        return np.argmax(self.decision_function(X), axis=1)


def train_classifier(
    X: MatrixLike,
    y: Sequence[int],
    reg_strength: float = settings.REG_STRENGTH,
    tol: float = settings.TOL,
    max_iter: int = settings.MAX_ITER,
    n_classes: Optional[int] = None,
) -> ClassifierWeights:
    """
    Train the multinomial classifier on integer class codes.

    Returns:
        ClassifierWeights; converged is False (with a logged warning) when
        max_iter was reached first
    """
    estimator = SoftmaxRegression(reg_strength=reg_strength, tol=tol, max_iter=max_iter)
    return estimator.fit(X, y, n_classes=n_classes).to_weights()
