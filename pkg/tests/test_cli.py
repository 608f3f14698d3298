import csv
import io
import json

import pytest

from cleanflex import ParseError
from cleanflex.cli import (
    FLEX_HEADER,
    SUMMARY_HEADER,
    Report,
    emit_csv,
    fmt,
    fmt_angle,
    main,
    parse_fourier,
    parse_params,
)


def split_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == FLEX_HEADER
    cut = rows.index(SUMMARY_HEADER)
    return rows[1:cut], rows[cut + 1:]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_fourier():
    u = parse_fourier("0, 0, 0, 0, 1")
    assert u(0.3) == pytest.approx(0.5646424733950354)
    assert parse_fourier("0,1", antiperiodic=True).parity == "antiperiodic"
    for bad in ("", "a,b", "1,nan"):
        with pytest.raises(ParseError):
            parse_fourier(bad)


def test_parse_params():
    assert parse_params(["eps=0.05", "lam=1"]) == {"eps": 0.05, "lam": 1.0}
    with pytest.raises(ParseError):
        parse_params(["eps"])


def test_number_formatting():
    assert fmt(float("inf")) == "inf"
    assert fmt(4.0) == "4" and fmt(True) == "true"
    assert fmt_angle(-0.0) == "0"
    assert fmt_angle(0.78539816339744828) == "0.785398163397"


def test_empty_report_has_headers():
    rows, summary = split_csv(emit_csv(Report()))
    assert rows == [] and summary == []


def test_flexes_sin2t(capsys):
    code, out, _ = run_cli(capsys, "flexes", "--fourier", "0,0,0,0,1", "--n", "1")
    assert code == 0
    rows, _ = split_csv(out)
    assert len(rows) == 4
    assert sorted(r[0] for r in rows) == ["clean-max", "clean-max", "clean-min", "clean-min"]


def test_census_sin2t_rows(capsys):
    code, out, _ = run_cli(capsys, "census", "--fourier", "0,0,0,0,1")
    rows, summary = split_csv(out)
    assert code == 0 and len(rows) == 4
    assert [s[0] for s in summary] == ["thm1.1", "thm6.1"]
    assert all(s[3] == "true" for s in summary)


def test_census_sharp_catalog(capsys):
    code, out, _ = run_cli(capsys, "census", "--catalog", "sharp", "--n", "3")
    assert code == 0
    rows, _ = split_csv(out)
    assert len(rows) == 8


def test_space_member_exits_2(capsys):
    code, out, err = run_cli(capsys, "census", "--fourier", "1,1,0", "--n", "1")
    assert code == 2 and out == ""
    assert "FunctionInSpace" in err


def test_bad_input_exits_2(capsys):
    assert run_cli(capsys, "census", "--catalog", "nope")[0] == 2
    assert run_cli(capsys, "census")[0] == 2
    assert run_cli(capsys, "census", "--fourier", "0,1", "--n", "0")[0] == 2


def test_antiperiodic_flexes(capsys):
    code, out, _ = run_cli(capsys, "flexes", "--fourier", "0,0,0,1", "--antiperiodic")
    rows, summary = split_csv(out)
    assert code == 0
    assert [float(r[1]) for r in rows] == pytest.approx([0, 2.0943951023931957, 4.1887902047863905],
                                                       abs=1e-8)
    assert {s[0] for s in summary} == {"thmA.8", "thmA.4"}


def test_curve_and_svg(tmp_path, capsys):
    svg = tmp_path / "oval.svg"
    code, out, _ = run_cli(capsys, "curve", "--catalog", "oval", "--param", "eps=0.1",
                           "--svg", str(svg))
    rows, summary = split_csv(out)
    assert code == 0 and len(rows) == 4
    assert svg.read_text().lstrip().startswith("<?xml")


def test_circle_curve_is_degenerate_but_plotted(tmp_path, capsys):
    svg = tmp_path / "circle.svg"
    code, _, err = run_cli(capsys, "curve", "--fourier", "1", "--svg", str(svg))
    assert code == 2 and "CircleDegenerate" in err
    assert "degenerate" in svg.read_text()


def test_corpus_keys_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["corpus", "--seed", "4", "--count", "3", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    _, summary = split_csv(a.read_text())
    assert [s[0] for s in summary] == [f"{i}:{k}" for i in range(3) for k in ("thm1.1", "thm6.1")]


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"fourier": "0,0,0,0,1", "n": 2, "grid": {"samples": 2048}}))
    # n=2 would put sin 2t in the space; the flag wins
    code, out, _ = run_cli(capsys, "census", "--config", str(cfg), "--n", "1")
    assert code == 0 and len(split_csv(out)[0]) == 4
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run_cli(capsys, "census", "--config", str(cfg))[0] == 2


def test_help_lists_commands(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "sextactic" in capsys.readouterr().out
