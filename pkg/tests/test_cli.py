"""Command-line behavior and file formats."""

import json
from fractions import Fraction

import pytest

from pmsim import automata as au
from pmsim import io
from pmsim import quantum as qm
from pmsim.cli import EXIT_INPUT, EXIT_OK, EXIT_RESOURCE, EXIT_VERDICT, main
from pmsim.errors import InvalidState


def corrupted_base():
    base = au.base_automaton()
    outs = [list(s) for s in base.outputs]
    outs[1][4] = -outs[1][4]
    return au.DetAutomaton(tuple(map(tuple, outs)), base.transitions)


@pytest.fixture
def state_files(tmp_path):
    paths = {}
    for name, s in (("singlet", qm.singlet()), ("mixed", qm.maximally_mixed())):
        p = tmp_path / f"{name}.json"
        io.write_text(p, io.dumps(io.state_json(s)))
        paths[name] = p
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"rho": [["1", "0", "0", "0"], ["0", "1", "0", "0"],
                                       ["0", "0", "-1", "0"], ["0", "0", "0", "0"]]}))
    paths["bad"] = bad
    return paths


def test_state_round_trip(state_files):
    assert io.load_state(state_files["singlet"]).rho == qm.singlet().rho


def test_state_file_errors(tmp_path, state_files):
    with pytest.raises(InvalidState) as exc:
        io.load_state(state_files["bad"])
    assert exc.value.invariant == "psd"
    p = tmp_path / "shape.json"
    p.write_text('{"rho": [[1]]}')
    with pytest.raises(InvalidState) as exc:
        io.load_state(p)
    assert exc.value.invariant == "shape"
    p.write_text("not json")
    with pytest.raises(InvalidState):
        io.load_state(p)


def test_behaviors_command(tmp_path):
    out = tmp_path / "b.json"
    assert main(["behaviors", "--out", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["count"] == 240 and len(data["behaviors"]) == 240
    rows = io.read_matrix_csv(out.with_suffix(".csv"))
    assert len(rows) == 64 and all(len(r) == 240 for r in rows)
    assert tuple(map(tuple, rows)) == au.behavior_matrix()
    first = out.read_bytes()
    assert main(["behaviors", "--out", str(out)]) == EXIT_OK
    assert out.read_bytes() == first


def test_behaviors_fault_injection(tmp_path, capsys):
    rc = main(["behaviors", "--out", str(tmp_path / "b.json")], base_automaton=corrupted_base())
    assert rc == EXIT_VERDICT
    err = capsys.readouterr().err
    assert "violation: context" in err


@pytest.mark.slow
def test_certify_command(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["certify", "--out", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "Q subset of P: true" in text
    data = json.loads(out.read_text())
    assert data["nonzero_witnesses"] == 24
    assert data["witnesses_per_context"] == {c.name: 4 for c in qm.contexts()}


def test_certify_ray_cap(tmp_path, capsys):
    assert main(["certify", "--out", str(tmp_path / "s.json"), "--ray-cap", "1"]) == EXIT_RESOURCE
    assert "exceeds cap" in capsys.readouterr().err


@pytest.mark.parametrize("name", ["singlet", "mixed"])
def test_ensemble_command(tmp_path, state_files, name):
    out = tmp_path / f"{name}-ens.json"
    assert main(["ensemble", "--state", str(state_files[name]), "--out", str(out)]) == EXIT_OK
    ens = io.load_ensemble(out)
    assert ens.moments() == qm.q_vector(io.load_state(state_files[name]))
    ver = json.loads((tmp_path / f"{name}-ens.verify.json").read_text())
    assert ver == {"depth": 3, "pass": True}


def test_ensemble_rejects_non_psd(tmp_path, state_files, capsys):
    rc = main(["ensemble", "--state", str(state_files["bad"]), "--out", str(tmp_path / "e.json")])
    assert rc == EXIT_INPUT
    assert "positive semidefinite" in capsys.readouterr().err


def _table(text):
    rows = {}
    for line in text.splitlines()[2:]:
        parts = line.split()
        if parts and parts[0][0] in "+-" and parts[0][1:].isdigit():
            n = sum(1 for p in parts if p in ("+1", "-1"))
            rows[tuple(int(p) for p in parts[:n])] = parts[n:]
    return rows


def test_simulate_examples(state_files, capsys):
    assert main(["simulate", "--state", str(state_files["singlet"]), "C,c,gamma"]) == EXIT_OK
    rows = _table(capsys.readouterr().out)
    assert rows[-1, -1, -1][0] == "1"
    assert main(["simulate", "--state", str(state_files["singlet"]), "A,A"]) == EXIT_OK
    rows = _table(capsys.readouterr().out)
    assert rows[1, -1][0] == rows[-1, 1][0] == "0"
    assert main(["simulate", "--state", str(state_files["mixed"]), "A,B"]) == EXIT_OK
    rows = _table(capsys.readouterr().out)
    assert len(rows) == 4 and all(v[0] == "1/4" for v in rows.values())


def test_simulate_with_ensemble(tmp_path, state_files, capsys):
    ens = tmp_path / "e.json"
    assert main(["ensemble", "--state", str(state_files["singlet"]), "--out", str(ens)]) == EXIT_OK
    capsys.readouterr()
    assert main(["simulate", "--state", str(state_files["singlet"]), "--ensemble", str(ens),
                 "C,c,C"]) == EXIT_OK
    assert "equal: true" in capsys.readouterr().out


def test_simulate_input_errors(state_files, capsys):
    assert main(["simulate", "--state", str(state_files["mixed"]), "A,b"]) == EXIT_INPUT
    assert "do not share a context" in capsys.readouterr().err
    assert main(["simulate", "--state", str(state_files["mixed"]), "A,Q"]) == EXIT_INPUT
    assert main(["simulate", "--state", "missing.json", "A"]) == EXIT_INPUT


def test_bad_arguments():
    assert main(["ensemble"]) == EXIT_INPUT
    assert main(["behaviors", "--depth", "1"]) == EXIT_INPUT
    assert main(["nonsense"]) == EXIT_INPUT


def test_selftest_fault_injection(capsys):
    assert main(["selftest"], base_automaton=corrupted_base()) == EXIT_VERDICT
    out = capsys.readouterr().out
    assert "first failing criterion: 1" in out


def test_ensemble_json_round_trip():
    from pmsim.ensemble import reconstruct_singlet_reference

    ref = reconstruct_singlet_reference()
    back = io.ensemble_from_json(json.loads(io.dumps(io.ensemble_json(ref))))
    assert back.weights == ref.weights
    assert set(back.weights.values()) == {Fraction(1, 4)}
