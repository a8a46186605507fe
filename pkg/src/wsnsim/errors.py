"""Exception hierarchy shared by all pipeline stages."""


class WsnSimError(Exception):
    """Base class for all simulator errors."""


class ScenarioError(WsnSimError):
    """Invalid scenario file or scenario invariant violation."""


class CoincidentNodes(ScenarioError):
    def __init__(self, id_a: int, id_b: int):
        super().__init__(f"nodes {id_a} and {id_b} share the same position")
        self.id_a = id_a
        self.id_b = id_b


class TooFewNodes(ScenarioError):
    def __init__(self, n: int, k: int):
        super().__init__(f"cannot fit {k} clusters with only {n} nodes")
        self.n = n
        self.k = k


class SingularCovariance(WsnSimError):
    """Covariance matrix is not symmetric positive-definite."""


class DegenerateLikelihood(WsnSimError):
    """Every mixture component underflows to zero density for some point."""


class ClusterDead(WsnSimError):
    """A cluster has no alive node left."""


class ClusterPartitioned(WsnSimError):
    def __init__(self, cluster_id: int, unreachable: list):
        super().__init__(
            f"cluster {cluster_id} communication graph is disconnected; "
            f"unreachable nodes: {sorted(unreachable)}"
        )
        self.cluster_id = cluster_id
        self.unreachable = sorted(unreachable)


class PipelineError(WsnSimError):
    """Wraps a stage failure with pipeline context."""


class FrequencyPlanError(WsnSimError):
    """Base class for frequency-plan violations."""


class DuplicateRequest(FrequencyPlanError):
    def __init__(self, cluster_id: int):
        super().__init__(f"cluster {cluster_id} already holds a frequency range")
        self.cluster_id = cluster_id


class NoFreeRange(FrequencyPlanError):
    """Free pool is empty; a withdrawal is required."""


class NothingToWithdraw(FrequencyPlanError):
    """No allocated cluster exists to donate a range."""


class BadChannel(FrequencyPlanError):
    def __init__(self, index: int, count: int):
        super().__init__(f"channel index {index} out of range [0, {count})")
        self.index = index
        self.count = count
