import json

import numpy as np
import pytest

from shockcert import cli
from shockcert.evans_system import SpectralParams
from shockcert.interval import ComplexInterval
from shockcert.ode_enclosure import ContourPiece, PieceEnclosure
from shockcert.polymodel import ChebModel
from shockcert.validate import validate
from shockcert.verify import (
    PieceResult,
    ReferenceEvans,
    assemble_certificate,
    build_contour,
    emit,
    evans_on_piece,
    split_piece,
    symmetry_check,
    winding_number,
)

SP = SpectralParams()


def test_contour_radius_and_coverage():
    c = build_contour(SP, 39)
    R = float(SP.R.mid())
    assert abs(R - (np.sqrt(5 / 3) + 0.5) ** 2) < 1e-14
    assert c.R_outer >= float(SP.R.hi) and c.R_outer - R < 2**-19
    ax = c.axis_pieces()
    assert len(ax) == 39 and len(c.arc_pieces()) == 1
    assert ax[0].lo == 0.0 and ax[-1].hi == c.R_outer
    assert all(a.hi == b.lo for a, b in zip(ax, ax[1:]))
    # [0, R/500] first, then geometrically growing pieces
    lens = np.array([p.hi - p.lo for p in ax])
    assert abs(lens[0] / c.R_outer - 1 / 500) < 1e-3
    assert np.all(np.diff(lens[1:]) > 0)


def test_contour_budget_validation():
    with pytest.raises(ValueError):
        build_contour(SP, 0)
    c = build_contour(SP, 1)
    assert c.axis_pieces()[0].hi == c.R_outer


def test_split_keeps_index():
    a, b = split_piece(ContourPiece("axis", 0.5, 1.0, index=7))
    assert (a.lo, a.hi, b.lo, b.hi) == (0.5, 0.75, 0.75, 1.0) and a.index == b.index == 7


def _const_side(side, vec, radius=0.0):
    m = ChebModel.const(np.asarray(vec, complex), 1, shape=(3,))
    return PieceEnclosure(side, m, radius, ComplexInterval.point(0.0 + 0.0j), 0.0, [], 0.0)


def _mock(piece, vl, vr, radius=0.0):
    return evans_on_piece(piece, _const_side("left", vl, radius), _const_side("right", vr, radius), 8)


def test_evans_on_piece_mocks():
    p = ContourPiece("axis", 0.5, 1.0)
    E = _mock(p, [1, 0, 0], [0, 1, 0])
    assert np.all(E.rects.contains_zero())
    assert not E.infReD > 0
    E = _mock(p, [1, 0, 0], [1, 0, 0])
    assert np.all((E.rects.re.lo <= 1) & (1 <= E.rects.re.hi))
    assert 0.99 < E.infReD <= 1.0
    # a radius widens the rectangles by about |Y| r + |V| r + r^2
    E2 = _mock(p, [1, 0, 0], [1, 0, 0], radius=0.1)
    assert E2.infReD <= 1.0 - 0.21 + 1e-12


def _results(contour, value=(1, 0, 0)):
    out = []
    for p in contour.pieces:
        out.append(PieceResult(p, 0, "ok", _mock(p, [1, 0, 0], list(value))))
    return out


def test_assemble_certified_and_inconclusive(tmp_path):
    c = build_contour(SP, 2)
    sym = {"ok": True}
    cert = assemble_certificate({"gamma": "5/3", "vplus": "2/5"}, c, {}, _results(c), sym, None, {})
    assert cert.verdict == "certified" and cert.reasons == []
    # straddling rectangles
    res = _results(c)
    res[1] = PieceResult(c.pieces[1], 0, "ok", _mock(c.pieces[1], [1, 0, 0], [0, 1, 0]))
    cert2 = assemble_certificate({}, c, {}, res, sym, None, {})
    assert cert2.verdict == "inconclusive" and any("Re D <= 0" in r for r in cert2.reasons)
    # missing piece
    cert3 = assemble_certificate({}, c, {}, _results(c)[:-1], sym, None, {})
    assert cert3.verdict == "inconclusive" and any("gap" in r for r in cert3.reasons)
    # failed symmetry
    cert4 = assemble_certificate({}, c, {}, _results(c), {"ok": False}, None, {})
    assert cert4.verdict == "inconclusive"


def test_validator_agrees_and_emit_is_deterministic(tmp_path):
    c = build_contour(SP, 3)
    for name, res in (("good", _results(c)), ("bad", _results(c)[:2])):
        cert = assemble_certificate({"gamma": "5/3", "vplus": "2/5"}, c, {}, res, {"ok": True}, None, {})
        a = emit(cert, tmp_path / name / "a", plot=True)
        b = emit(cert, tmp_path / name / "b", plot=True)
        for k in a:
            assert a[k].read_bytes() == b[k].read_bytes()
        v = validate(a["certificate"])
        assert v["agrees"] and v["verdict"] == cert.verdict
    d = json.loads((tmp_path / "good" / "a" / "certificate.json").read_text())
    assert d["schema"] == "shockcert.certificate" and d["verdict"] == "certified"
    rows = (tmp_path / "good" / "a" / "pieces.csv").read_text().splitlines()
    assert rows[0].startswith("piece,kind") and len(rows) == 1 + 8 * len(c.pieces)


def test_validator_detects_tampering(tmp_path):
    c = build_contour(SP, 2)
    cert = assemble_certificate({}, c, {}, _results(c), {"ok": True}, None, {})
    p = emit(cert, tmp_path, plot=False)["certificate"]
    d = json.loads(p.read_text())
    d["pieces"][0]["rects"][0][2] = "-0.5"
    p.write_text(json.dumps(d))
    assert not validate(p)["agrees"]


@pytest.fixture(scope="module")
def ref():
    return ReferenceEvans(SP)


def test_reference_conjugate_symmetry_and_winding(ref):
    c = build_contour(SP, 6)
    s = symmetry_check(SP, ref, c, samples=2)
    assert s["ok"] and s["interval_identity"]
    # closed contour: axis upward, arc, and the mirrored lower half
    R = c.R_outer
    up = 1j * np.linspace(1e-3, R, 40)
    arc = R * np.exp(1j * np.linspace(np.pi / 2, 0, 30))[1:]
    half = np.concatenate([up, arc])
    path = np.concatenate([half, np.conj(half[::-1])[1:-1]])
    D = ref(path)
    assert abs(winding_number(D)) < 0.5


def test_cli_precondition_exit_code(tmp_path):
    assert cli.main(["--vplus", "1.5", "--out", str(tmp_path), "-q"]) == cli.EXIT_PRECONDITION
    assert cli.main(["--vplus", "0.4", "--grid-step", "0.3", "--out", str(tmp_path), "-q"]) == cli.EXIT_PRECONDITION


def test_cli_config_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[shockcert]\nschema = 1\naxis_pieces = 12\nvplus = 1/4\n")
    monkeypatch.setenv("SHOCKCERT_WORKERS", "2")
    args = cli.build_parser().parse_args(["--config", str(cfg), "--axis-pieces", "20"])
    s = cli.resolve_settings(args)
    assert s["axis_pieces"] == 20 and str(s["vplus"]) == "1/4" and s["workers"] == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[shockcert]\nschema = 7\n")
    assert cli.main(["--config", str(bad), "-q"]) == cli.EXIT_PRECONDITION
