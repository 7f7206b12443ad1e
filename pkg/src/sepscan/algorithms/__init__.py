"""The testers: components, tree testing, separators and separation-number descent."""

from .ci import ci_support_graph, ci_test_tree
from .components import QueryBoundError, components
from .descent import SnEstimate, estimate_sn, test_conditional, test_marginal
from .outcome import SeparatorConfig, TestOutcome, TraceEntry, TreeTestConfig, Verdict
from .separator import DegenerateSampleError, ab_separator, separator
from .sizes import default_delta_prime, sample_size_separator, sample_size_tree
from .tree import direct_subgraph_check, find_balanced_partition_tree, test_tree

__all__ = [
    "DegenerateSampleError", "QueryBoundError", "SeparatorConfig", "SnEstimate", "TestOutcome",
    "TraceEntry", "TreeTestConfig", "Verdict", "ab_separator", "ci_support_graph", "ci_test_tree",
    "components", "default_delta_prime", "direct_subgraph_check", "estimate_sn",
    "find_balanced_partition_tree", "sample_size_separator", "sample_size_tree", "separator",
    "test_conditional", "test_marginal", "test_tree",
]
