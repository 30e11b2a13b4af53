import math
import shutil
from pathlib import Path

import pytest

import prunetrace as pt

TMP = Path("python_smoke_tmp")


@pytest.fixture(scope="module")
def tmp_root():
    shutil.rmtree(TMP, ignore_errors=True)
    TMP.mkdir(parents=True)
    return TMP


def test_version():
    assert pt.__version__ == "0.1.0"


def test_convolution_against_direct_sum():
    g = pt.Grid(6, 5, 0.5)
    a = pt.IndicatorField(g)
    b = pt.IndicatorField(g)
    for i, j in [(1, 1), (2, 3), (4, 0)]:
        a.set(i, j, True)
    for i, j in [(0, 0), (1, 2)]:
        b.set(i, j, True)
    out = pt.convolve(a, b)
    for x in range(g.nx):
        for y in range(g.ny):
            direct = 0.0
            for i in range(g.nx):
                for j in range(g.ny):
                    di, dj = i - x, j - y
                    if 0 <= di < g.nx and 0 <= dj < g.ny and a.get(i, j) and b.get(di, dj):
                        direct += g.h * g.h
            assert out.get(x, y) == pytest.approx(direct, abs=1e-12)


def test_unsweep_shrinks_envelope():
    g = pt.Grid(24, 24, 1.0)
    env = pt.IndicatorField(g)
    for i in range(g.nx):
        for j in range(g.ny):
            env.set(i, j, 2 <= i <= 21 and 2 <= j <= 21)
    sweep = pt.make_rotation_sweep(12.0, 12.0, 0.0, math.radians(-30.0), 16)
    star = pt.unsweep(sweep, env, g)
    assert 0 < star.count() < env.count()
    for i in range(g.nx):
        for j in range(g.ny):
            assert not (star.get(i, j) and not env.get(i, j))


def test_elasticity_stiffens_with_thickness():
    def tip_compliance(rows):
        g = pt.Grid(24, 8, 0.01)
        d = pt.IndicatorField(g)
        for i in range(g.nx):
            for j in rows:
                d.set(i, j, True)
        bc = pt.BoundaryConditions()
        for j in range(g.ny + 1):
            bc.fix_node(0, j)
        bc.load_node(g.nx, 4, 0.0, -1.0)
        return pt.solve_elasticity(d, pt.Material(1e9, 0.3), bc).compliance

    thin = tip_compliance(range(3, 5))
    thick = tip_compliance(range(1, 7))
    assert thick < thin


def test_prune_is_order_independent():
    g = pt.Grid(20, 20, 1.0)
    left = pt.custom_constraint("left", lambda x, y: x <= 14.0)
    low = pt.custom_constraint("low", lambda x, y: y <= 11.0)
    ab = pt.prune_pointwise([left, low], g)
    ba = pt.prune_pointwise([low, left], g)
    assert ab.pruned.count() == ba.pruned.count() == 15 * 12
    assert not ab.empty_warning
    assert dict(ab.per_constraint)["left"] == pytest.approx(15 * 20 / 400)


def test_scenario_roundtrip_and_run(tmp_root):
    scn = tmp_root / "scn"
    files = pt.generate_scenario("cantilever", str(scn))
    assert "cantilever.ini" in files
    s = pt.load_scenario(str(scn / "cantilever.ini"))
    assert pt.validate_scenario(s) == []
    assert (s.grid.nx, s.grid.ny) == (64, 32)

    with pytest.raises(pt.ConfigError):
        pt.load_scenario(str(scn / "missing.ini"))

    ini = tmp_root / "tiny.ini"
    ini.write_text(
        "\n".join(
            [
                "[grid]",
                "nx = 12",
                "ny = 6",
                "h = 1.0",
                "[material]",
                "young = 1e9",
                "poisson = 0.3",
                "[domain]",
                "shape = rect 0 0 11 5",
                "[frozen]",
                "shape = rect 10 2 11 3",
                "[bc]",
                "fix = rect 0 0 0 6 xy",
                "load = node 12 3 0 -1e3",
                "[loop]",
                "delta = 0.1",
                "v_min = 0.8",
                "max_inner_iters = 50",
                "[output]",
                f"dir = {tmp_root.resolve()}/tiny_out",
                "",
            ]
        )
    )
    run = pt.run_scenario(pt.load_scenario(str(ini)))
    assert run.exit_code == 0
    assert [p.volume_fraction for p in run.front] == sorted(
        (p.volume_fraction for p in run.front), reverse=True
    )
    assert len(run.front) == 3
    assert all(p.status == "ok" for p in run.front)
    assert run.front[0].design.count() == run.initial.count()
    assert (tmp_root / "tiny_out" / "pareto.csv").exists()
    assert (tmp_root / "tiny_out" / "manifest.txt").exists()
