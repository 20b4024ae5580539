"""scikit-learn style wrappers around the point-cloud pipelines.

Parameters are plain constructor arguments, so ``get_params``/``set_params``
and ``clone`` work. ``fit`` takes an ``(n_points, dim)`` array-like of
coordinates; ``transform`` returns diagram points as an ``(m, 3)`` float
array of ``(birth, death, multiplicity)`` in radius units.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .gmodule import PersistenceDiagram
from .linalg import parse_field
from .pipelines import (PointCloud, RadiusSchedule, compare_shapes, rips_filtrations,
                        subsample_pipeline)


def _cloud(X) -> PointCloud:
    if isinstance(X, PointCloud):
        return X
    return PointCloud(tuple(tuple(str(c) if isinstance(c, (float, np.floating)) else c for c in row)
                            for row in np.asarray(X, dtype=object).tolist()))


def _as_array(diag: PersistenceDiagram) -> np.ndarray:
    return np.array([[float(b), float(d), m] for b, d, m in diag.points], dtype=float).reshape(-1, 3)


class SubsamplePersistence(TransformerMixin, BaseEstimator):
    """Diagram of the parallel graph of two disjoint random subsamples.

    After ``fit``: ``ranks_`` (window ranks), ``diagram_`` (index units),
    ``radius_diagram_`` and ``metadata_``.
    """

    def __init__(self, radii=(0.1, 0.2, 0.3), n_sub=None, k=1, field="fp:46337",
                 max_dim=2, seed=0):
        self.radii = radii
        self.n_sub = n_sub
        self.k = k
        self.field = field
        self.max_dim = max_dim
        self.seed = seed

    def fit(self, X, y=None):
        pc = _cloud(X)
        sched = RadiusSchedule(tuple(self.radii))
        n_sub = self.n_sub if self.n_sub is not None else len(pc) // 2
        res = subsample_pipeline(pc, sched, n_sub, self.seed, self.k, parse_field(self.field),
                                 self.max_dim)
        self.ranks_ = res.ranks
        self.diagram_ = res.diagram
        self.radius_diagram_ = res.radius_diagram
        self.metadata_ = res.metadata
        return self

    def transform(self, X=None):
        check_is_fitted(self, "radius_diagram_")
        return _as_array(self.radius_diagram_)


class ShapeComparison(BaseEstimator):
    """Compare two point clouds through the intersection/union graph.

    ``fit(X, Y)`` sets ``diagram_x_``, ``diagram_y_``, ``diagram_g_`` (index
    units) and ``bottleneck_`` = ``(d(X, G), d(Y, G))``.
    """

    def __init__(self, radii=(0.1, 0.2, 0.3), k=1, field="fp:46337", max_dim=2):
        self.radii = radii
        self.k = k
        self.field = field
        self.max_dim = max_dim

    def fit(self, X, Y):
        sched = RadiusSchedule(tuple(self.radii))
        xf, yf = rips_filtrations(_cloud(X), _cloud(Y), sched, self.max_dim)
        res = compare_shapes(xf, yf, self.k, parse_field(self.field))
        self.diagram_x_, self.diagram_y_, self.diagram_g_ = res.diagram_x, res.diagram_y, res.diagram_g
        self.bottleneck_ = (res.bottleneck_x, res.bottleneck_y)
        return self

    def score(self, X, Y):
        """Negated larger bottleneck distance (higher means more similar)."""
        self.fit(X, Y)
        return -max(self.bottleneck_)
