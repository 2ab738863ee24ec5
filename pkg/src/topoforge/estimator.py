"""scikit-learn style front end for the clustering pipeline.

StationClustering turns an (n, 2) coordinate array plus per-sample traffic
weights into a flat clustering: each cluster is one indivisible subnetwork of
the partition tree, served by one station at the cluster's cost-optimal
location.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .instance import CostModel, Instance, SolverConfig, Thresholds, User
from .oracle import nearest_center_assignment
from .tree import solve_topology


class StationClustering(ClusterMixin, BaseEstimator):
    """Cluster weighted planar points around cost-optimal shared stations.

    The total cost of a clustering is the sum, over clusters, of the station
    cost ``es_fixed + es_rate * W**es_exponent`` (W is the cluster's total
    sample weight) plus every member's link cost ``w**link_exponent * dist``
    to the cluster's station. The fit recursively splits the point set with a
    rotating separating line through each cluster's optimal station location,
    then a dynamic program over the resulting binary tree picks the frontier
    of clusters with the minimal total cost.

    Parameters
    ----------
    link_exponent : float, default=1.0
        Exponent applied to the sample weight inside the link cost.
    es_fixed, es_rate, es_exponent : float
        Station cost coefficients; ``es_exponent < 1`` gives economies of
        scale, which is what makes sharing stations worthwhile.
    epsilon : float, default=1e-7
        Convergence accuracy of the station-location iteration.
    sweep_strategy : {"full_scan", "fibonacci_if_bimodal"}
        How the separating-line angle is minimized.
    bimodal_range_cutoff : float, default=0.05
    bimodal_n_cutoff : int, default=25
        Gates for the logarithmic angle search.
    refine_max_passes : int, default=50
        Cap on reassign/relocate polish passes after each split.
    min_weight : float, default=0.0
    min_users : int, default=1
        Designer floors below which a cluster is not split further.
    max_depth : int, default=6
        Depth cap of the partition tree.
    random_state : int, default=0
        Seed for the angle search's starting probe.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
        Cluster index of each sample.
    cluster_centers_ : ndarray of shape (n_clusters_, 2)
        Station location of each cluster.
    n_clusters_ : int
    total_cost_ : float
        Optimal total cost (stations plus links).
    solution_ : Solution
        Full result, including the audit tree.
    """

    def __init__(
        self,
        link_exponent=1.0,
        es_fixed=5.0,
        es_rate=2.0,
        es_exponent=0.5,
        epsilon=1e-7,
        sweep_strategy="full_scan",
        bimodal_range_cutoff=0.05,
        bimodal_n_cutoff=25,
        refine_max_passes=50,
        min_weight=0.0,
        min_users=1,
        max_depth=6,
        random_state=0,
    ):
        self.link_exponent = link_exponent
        self.es_fixed = es_fixed
        self.es_rate = es_rate
        self.es_exponent = es_exponent
        self.epsilon = epsilon
        self.sweep_strategy = sweep_strategy
        self.bimodal_range_cutoff = bimodal_range_cutoff
        self.bimodal_n_cutoff = bimodal_n_cutoff
        self.refine_max_passes = refine_max_passes
        self.min_weight = min_weight
        self.min_users = min_users
        self.max_depth = max_depth
        self.random_state = random_state

    def _components(self):
        model = CostModel(
            link_exponent=self.link_exponent,
            es_fixed=self.es_fixed,
            es_rate=self.es_rate,
            es_exponent=self.es_exponent,
        )
        thresholds = Thresholds(
            min_weight=self.min_weight,
            min_users=self.min_users,
            max_depth=self.max_depth,
        )
        config = SolverConfig(
            epsilon=self.epsilon,
            sweep_strategy=self.sweep_strategy,
            bimodal_range_cutoff=self.bimodal_range_cutoff,
            bimodal_n_cutoff=self.bimodal_n_cutoff,
            refine_max_passes=self.refine_max_passes,
            rng_seed=self.random_state,
        )
        return model, thresholds, config

    def fit(self, X, y=None, sample_weight=None):
        """Compute the optimal station clustering of X.

        Parameters
        ----------
        X : array-like of shape (n_samples, 2)
            Planar coordinates.
        y : ignored
        sample_weight : array-like of shape (n_samples,), optional
            Positive traffic weights; defaults to all ones.
        """
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"X must have exactly 2 columns, got {X.shape[1]}")
        n = X.shape[0]
        if sample_weight is None:
            w = np.ones(n)
        else:
            w = check_array(sample_weight, ensure_2d=False, dtype=float)
            if w.shape != (n,):
                raise ValueError("sample_weight must match the number of samples")
            if not np.all(w > 0):
                raise ValueError("sample_weight must be strictly positive")
        model, thresholds, config = self._components()
        instance = Instance(
            tuple(User(i, float(X[i, 0]), float(X[i, 1]), float(w[i])) for i in range(n))
        )
        solution = solve_topology(instance, model, config, thresholds)
        labels = np.empty(n, dtype=int)
        centers = np.empty((len(solution.frontier), 2))
        for c, k in enumerate(solution.frontier):
            node = solution.tree.nodes[k]
            labels[node.members] = c
            centers[c] = node.center
        self.labels_ = labels
        self.cluster_centers_ = centers
        self.n_clusters_ = len(solution.frontier)
        self.total_cost_ = solution.total_cost
        self.solution_ = solution
        return self

    def predict(self, X):
        """Assign new points to the nearest fitted station (by link cost).

        Note that the fit itself refines assignments only within each
        recursive split, so for borderline training points ``predict`` can
        disagree with ``labels_``: a user may belong to a cluster whose
        station is not its nearest one.
        """
        check_is_fitted(self, "cluster_centers_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"X must have exactly 2 columns, got {X.shape[1]}")
        model = self._components()[0]
        return nearest_center_assignment(X, np.ones(X.shape[0]), self.cluster_centers_, model)
