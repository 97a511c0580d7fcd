"""Walk the seven-item packing instance through the whole pipeline.

Prints layer sizes before and after reduction, the frontier with one
witness per point, and the label counts of each search direction.
"""

from modonet.core import to_tuples
from modonet.problems import build_model, packing_example
from modonet.recursion import compile_model
from modonet.search import recover_all, solve
from modonet.vpo import prune_parallel_arcs, reduce_sweep


def main() -> None:
    model = build_model(packing_example())
    net = compile_model(model)
    print("compiled layer sizes:", net.layer_sizes(), f"({net.count_paths()} paths)")
    witnesses_net = net.copy()
    reduce_sweep(net)
    prune_parallel_arcs(net)
    net = net.compact()
    print("reduced layer sizes: ", net.layer_sizes(), f"({net.count_paths()} paths)")

    td, bu = solve(net, "td"), solve(net, "bu")
    coup5, greedy = solve(net, "coup", meet_layer=5), solve(net, "coup")
    print(f"labels: top-down {td.labels}, bottom-up {bu.labels}, "
          f"coupled at layer 5 {coup5.labels}, greedy (layer {greedy.meet_layer}) {greedy.labels}")

    xs = recover_all(witnesses_net, coup5.frontier, model.decode)
    print("frontier:")
    for point, x in zip(to_tuples(coup5.frontier), xs):
        print(f"  {point}  x = {tuple(x)}")


if __name__ == "__main__":
    main()
