"""The C2-module corpus used by the oracle comparison."""
from hfpss.abgroup import FgAbGroup, IntMatrix
from hfpss.c2cohomology import C2Module


def module_corpus() -> list[tuple[str, C2Module]]:
    out = []
    for n in range(2, 17):
        g = FgAbGroup.cyclic(n, "x")
        out.append((f"Z/{n} trivial", C2Module.trivial(g)))
        out.append((f"Z/{n} sign", C2Module.sign(g)))
    z = FgAbGroup.integers("x")
    out.append(("Z trivial", C2Module.trivial(z)))
    out.append(("Z sign", C2Module.sign(z)))
    z2 = FgAbGroup.from_orders([0, 0], ["x", "y"])
    for label, rows in [
        ("trivial", [[1, 0], [0, 1]]),
        ("sign", [[-1, 0], [0, -1]]),
        ("swap", [[0, 1], [1, 0]]),
        ("mixed", [[1, 0], [0, -1]]),
        ("negswap", [[0, -1], [-1, 0]]),
    ]:
        out.append((f"Z^2 {label}", C2Module(z2, IntMatrix.from_rows(rows))))
    return out
