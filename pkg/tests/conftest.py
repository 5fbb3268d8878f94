import pytest

from dagtrace import GraphParams, LayeredGraph

# the worked example graph: two parallel routes through a width-2 layer,
# then a single bottleneck node before the destination
FIG_GRAPH = LayeredGraph(
    layer_sizes=[1, 2, 1, 1],
    gaps=[
        [(0, 1, 2), (0, 2, 1)],
        [(1, 3, 3), (2, 3, 2)],
        [(3, 4, 1)],
    ],
)

FIG_QUESTION = (
    "BoS l1 [ n0 n1 2 | n0 n2 1 | ] l2 [ n1 n3 3 | n2 n3 2 | ] l3 [ n3 n4 1 | ]"
)
FIG_TRACE_EFFICIENT = (
    "BoT n0 n2 1 | n0 n1 2 | n0 n1 n3 5 | n0 n2 n3 3 | n0 n2 n3 n4 4 | EoT"
)
FIG_TRACE_INEFFICIENT = (
    "BoT n0 n1 2 | n0 n1 n3 5 | n0 n1 n3 n4 6 | n0 n2 1 | n0 n2 n3 3 | n0 n2 n3 n4 4 | EoT"
)
FIG_ANSWER = "n0 n2 n3 n4 4 | EoS"


@pytest.fixture
def fig_graph():
    return LayeredGraph(
        layer_sizes=list(FIG_GRAPH.layer_sizes),
        gaps=[list(gap) for gap in FIG_GRAPH.gaps],
    )


@pytest.fixture(scope="session")
def paper_params():
    return GraphParams(layers=7, max_width=6, max_cost=5, edge_prob=0.6)


@pytest.fixture(scope="session")
def small_params():
    return GraphParams(layers=4, max_width=4, max_cost=5, edge_prob=0.6)
