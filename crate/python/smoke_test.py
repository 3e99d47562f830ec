"""Smoke test for the pysggraph extension module (build it with `maturin build` in crates/py)."""

import math

import pysggraph as sg


def main():
    pair = sg.Window.rect(0, 1, 0, 0)
    assert len(pair) == 2
    table = sg.exact_distribution(sg.Model.edge(), pair, 1.0)
    assert abs(sum(table["probabilities"]) - 1.0) < 1e-12
    assert abs(table["marginals"][0] - 1.0 / (1.0 + math.e)) < 1e-12

    ferrari = sg.Model.ferrari(0.3, 0.5)
    assert abs(ferrari.m + 0.6) < 1e-12
    bs = sg.beta_star(ferrari.m)
    assert bs > 0 and sg.alpha(bs + 1.0, ferrari.m) < 1.0

    box = sg.Window.rect(0, 1, 0, 1)
    assert sg.detailed_balance_residual(ferrari, box, 6.0) < 1e-12
    draws = sg.perfect_samples(sg.Model.edge(), box, 3.0, 200, 7)
    assert len(draws) == 200
    assert draws == sg.perfect_samples(sg.Model.edge(), box, 3.0, 200, 7)
    edges = set(box.edges())
    assert all(set(map(tuple, d)) <= edges for d in draws)

    mean, se = sg.ergodic_edge_count(sg.Model.edge(), pair, 1.0, 10.0, 2000.0, 3)
    assert abs(mean - table["marginals"][0]) < 5 * se + 1e-9

    try:
        sg.perfect_samples(sg.Model.edge(), box, 0.1, 1, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("subcritical beta accepted")

    rows = sg.validate(7)
    assert rows and all(ok for _, ok, _ in rows)
    print("pysggraph smoke test passed")


if __name__ == "__main__":
    main()
