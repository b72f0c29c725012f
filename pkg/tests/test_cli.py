import csv
import io
import json
import math

import pytest

from corrugated_casimir.cli import ConfigError, main, parse_config
from corrugated_casimir.model import MaterialKind
from corrugated_casimir.response import Method

REFERENCE = """\
# reference configuration
L = 100nm
lambda_C = 1.2um
lambda_P = 137nm
a1a2 = 200nm2
Ly = 24um
material = plasma
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def ref_file(tmp_path):
    p = tmp_path / "ref.cfg"
    p.write_text(REFERENCE)
    return str(p)


def test_parse_reference_configuration():
    cfg = parse_config(REFERENCE)
    g = cfg.geometry
    assert g.L == 1e-7 and g.lambda_c == 1.2e-6 and g.Ly == 24e-6 and g.Lx == 24e-6
    assert g.a1a2 == 2e-16
    assert g.b == 0.0 and g.theta == 0.0
    assert cfg.material.kind is MaterialKind.PLASMA and cfg.material.lambda_p == 1.37e-7
    assert cfg.method is Method.SCATTERING and cfg.output == "csv" and cfg.output_path == "-"


def test_parse_units_and_optional_keys():
    cfg = parse_config(
        "L = 1 µm\nLx = 0.1mm\nLy = 50um\na1 = 10nm\na2 = 20e-9 m\nlambda_C = 2.4um\n"
        "b = 300nm\ntheta = 0.5deg\nmaterial = perfect\nmethod = pfa\nrel_tol = 1e-4\noutput = json\n"
    )
    g = cfg.geometry
    assert g.L == 1e-6 and g.Lx == 1e-4 and g.a1 == 1e-8 and g.a2 == 2e-8 and g.b == 3e-7
    assert g.theta == pytest.approx(0.5 * math.pi / 180, rel=1e-15)
    assert cfg.material.is_perfect and cfg.method is Method.PFA
    assert cfg.quadrature.rel_tol == 1e-4 and cfg.output == "json"


@pytest.mark.parametrize(
    "text, fragments",
    [
        (REFERENCE + "theta = 0.01\n", ["theta", "line 8", "suffix"]),
        (REFERENCE.replace("100nm", "100km"), ["'L'", "line 2", "bad unit suffix"]),
        (REFERENCE.replace("= 100nm", "= 100"), ["'L'", "line 2", "missing unit suffix"]),
        (REFERENCE + "colour = red\n", ["colour", "line 8", "unknown key"]),
        (REFERENCE + "L = 1um\n", ["'L'", "line 8", "duplicate"]),
        (REFERENCE + "a1 = 1nm\na2 = 1nm\n", ["a1a2", "not both"]),
        (REFERENCE.replace("plasma", "gold"), ["material", "line 7"]),
        (REFERENCE + "method = magic\n", ["method", "line 8"]),
    ],
)
def test_parse_errors_name_key_and_line(text, fragments):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    for frag in fragments:
        assert frag in str(info.value)


def test_lambda_p_with_perfect_mirror():
    text = REFERENCE.replace("material = plasma", "material = perfect")
    with pytest.raises(ConfigError, match="lambda_P meaningless for perfect mirrors"):
        parse_config(text)


def test_empty_document_lists_all_missing_keys():
    with pytest.raises(ConfigError) as info:
        parse_config("")
    msg = str(info.value)
    for key in ("L", "Ly", "lambda_C", "material", "a1a2"):
        assert key in msg


def test_invalid_geometry_is_config_error():
    with pytest.raises(ConfigError, match="separation"):
        parse_config(REFERENCE.replace("100nm", "0nm"))


def test_torque_max_csv(capsys, ref_file):
    code, out, err = run(capsys, "torque-max", ref_file)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["method", "tau_N_per_m", "theta_star_rad", "theta_star_over_lambdaC_Ly"]
    assert len(rows) == 2
    assert float(rows[1][1]) == pytest.approx(5.2e-7, rel=0.05)
    assert "\r" not in out and out.endswith("\n")


def test_landscape_csv_argmin(capsys, ref_file):
    code, out, _ = run(capsys, "landscape", ref_file, "--b-steps", "33", "--theta-steps", "17")
    assert code == 0
    reader = csv.DictReader(io.StringIO(out))
    assert reader.fieldnames == ["b_m", "theta_rad", "delta_e_J_per_m2"]
    rows = list(reader)
    assert len(rows) == 33 * 17
    best = min(rows, key=lambda r: float(r["delta_e_J_per_m2"]))
    assert float(best["b_m"]) == 0.0 and float(best["theta_rad"]) == 0.0


def test_sweep_k_forty_rows(capsys, tmp_path):
    p = tmp_path / "one.cfg"
    p.write_text(REFERENCE.replace("100nm", "1um"))
    code, out, _ = run(capsys, "sweep-k", str(p), "--k-min", "1e5", "--k-max", "1e7", "--workers", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k_rad_per_m,tau_scattering,tau_pfa,tau_perfect,theta_star"
    rows = [list(map(float, line.split(","))) for line in lines[1:]]
    assert len(rows) == 40
    ks = [r[0] for r in rows]
    assert ks[0] == pytest.approx(1e5) and ks[-1] == pytest.approx(1e7)
    assert all(b > a for a, b in zip(ks, ks[1:]))
    assert all(all(math.isfinite(v) for v in r) for r in rows)


@pytest.mark.parametrize("sub", ["energy", "epp", "gk", "torque", "compare", "torque-max"])
def test_json_round_trip_is_bitwise(capsys, ref_file, tmp_path, sub):
    code, first, _ = run(capsys, sub, ref_file, "--output", "json")
    assert code == 0
    doc = json.loads(first)
    assert set(doc) == {"config", "rows"} and doc["rows"]
    echo = tmp_path / "echo.json"
    echo.write_text(first)
    code, second, _ = run(capsys, sub, str(echo), "--output", "json")
    assert code == 0 and second == first
    # the echoed config reproduces the parsed configuration exactly
    assert parse_config(first) == parse_config(REFERENCE)


def test_round_trip_with_individual_amplitudes(capsys, tmp_path):
    text = REFERENCE.replace("a1a2 = 200nm2", "a1 = 10nm\na2 = 20nm") + "theta = 0.3deg\nb = 70nm\n"
    src = tmp_path / "a.cfg"
    src.write_text(text)
    _, first, _ = run(capsys, "torque", str(src), "--output", "json")
    echo = tmp_path / "a.json"
    echo.write_text(first)
    _, second, _ = run(capsys, "torque", str(echo), "--output", "json")
    assert first == second
    assert parse_config(first).geometry == parse_config(text).geometry


def test_determinism_and_timestamp_comment(capsys, ref_file):
    _, a, _ = run(capsys, "compare", ref_file)
    _, b, _ = run(capsys, "compare", ref_file)
    assert a == b
    _, c, _ = run(capsys, "compare", ref_file, "--timestamp")
    first, rest = c.split("\n", 1)
    assert first.startswith("# ")
    assert rest == a


def test_compare_rows(capsys, ref_file):
    _, out, _ = run(capsys, "compare", ref_file)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["method"] for r in rows] == ["scattering", "pfa", "perfect"]
    assert float(rows[0]["ratio_to_scattering"]) == 1.0
    assert float(rows[2]["ratio_to_scattering"]) > 1.0 and float(rows[1]["ratio_to_scattering"]) > 1.0


def test_output_path(capsys, ref_file, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "epp", ref_file, "--output-path", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("L_m,material,e_pp_J_per_m2")


def test_exit_codes(capsys, tmp_path, ref_file):
    assert run(capsys, "epp", str(tmp_path / "missing.cfg"))[0] == 2
    assert run(capsys, "epp")[0] == 2
    assert run(capsys, "frobnicate", ref_file)[0] == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("L = 1\n")
    code, _, err = run(capsys, "epp", str(bad))
    assert code == 2 and "config error" in err
    pfa = tmp_path / "pfa.cfg"
    pfa.write_text(REFERENCE + "method = pfa\n")
    code, out, err = run(capsys, "optimize", str(pfa))
    assert code == 1 and out == "" and "computation error" in err
    assert run(capsys, "--help")[0] == 0


def test_regime_warnings_go_to_stderr(capsys, ref_file):
    code, out, err = run(capsys, "epp", ref_file)
    assert code == 0
    assert "warning" in err and "warning" not in out
