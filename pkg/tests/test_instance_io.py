import json

import numpy as np
import pytest

from relcalc import InstanceFormatError, Relation, TolerancePolicy, compare, components, is_self_adjoint
from relcalc.harness import InstanceSpec, gen_hermitian, gen_perturbation, gen_relation, gen_self_adjoint
from relcalc.instance_io import Instance, dump, dumps, load, loads


def test_round_trip_is_bitwise(tmp_path):
    for seed in range(25):
        n = 1 + seed % 5
        spec = InstanceSpec(n, seed % n, None, seed, 0.4)
        t = gen_hermitian(spec)
        p = gen_perturbation(t, spec)
        inst = Instance(n, {"T": t, "S": p.relation, "R": gen_relation(spec)},
                        witness={"a": p.witness_a, "b": p.witness_b})
        path = tmp_path / f"i{seed}.json"
        dump(inst, path)
        back = load(path)
        assert back.equals(inst)
        for k in inst.relations:
            np.testing.assert_array_equal(back.relations[k].graph.basis, inst.relations[k].graph.basis)
        assert back.witness == inst.witness
        assert dumps(back) == dumps(inst)


def test_self_adjoint_layout():
    t = gen_self_adjoint(InstanceSpec(3, 0, seed=1))
    doc = json.loads(dumps(Instance(3, {"T": t})))
    rows = doc["relations"]["T"]["basis"]
    assert len(rows) == 3 and all(len(r) == 12 for r in rows)
    assert doc["tol"] == {"rank_rel_tol": 1e-10, "angle_tol": 1e-8}
    assert is_self_adjoint(loads(dumps(Instance(3, {"T": t}))).relations["T"])


def test_one_dimensional_hermitian():
    t = gen_hermitian(InstanceSpec(2, 0, 1, seed=4))
    back = loads(dumps(Instance(2, {"T": t})))
    assert back.relations["T"].dim == 1


def test_spanning_rows_are_orthonormalized():
    # graph of diag(1, 2) written as three dependent, unnormalized rows
    rows = [[1, 0, 0, 0, 1, 0, 0, 0], [0, 0, 2, 0, 0, 0, 4, 0], [1, 0, 1, 0, 1, 0, 2, 0]]
    inst = loads(json.dumps({"space_dim": 2, "relations": {"T": {"basis": rows}}}))
    t = inst.relations["T"]
    assert t.dim == 2
    assert compare(t.graph, Relation.from_matrix(np.diag([1.0, 2.0])).graph).equal


def test_custom_tolerances_and_extra_keys():
    tol = TolerancePolicy(1e-9, 1e-7)
    inst = Instance(2, {"T": Relation.zero(2, tol)}, tol, extra={"note": "x"})
    back = loads(dumps(inst))
    assert back.tol == tol and back.extra == {"note": "x"}
    assert back.relations["T"].dim == 0
    assert components(back.relations["T"]).domain.dim == 0


@pytest.mark.parametrize(
    "doc",
    [
        "not json",
        "[]",
        {"space_dim": 0, "relations": {"T": {"basis": []}}},
        {"space_dim": True, "relations": {"T": {"basis": []}}},
        {"space_dim": 1, "relations": {}},
        {"space_dim": 1, "relations": {"T": {}}},
        {"space_dim": 1, "relations": {"T": {"basis": "x"}}},
        {"space_dim": 1, "relations": {"T": {"basis": [[1, 0, 0]]}}},
        {"space_dim": 1, "relations": {"T": {"basis": [[1, 0, "a", 0]]}}},
        {"space_dim": 1, "relations": {"T": {"basis": [[1, 0, None, 0]]}}},
        {"space_dim": 1, "relations": {"T": {"basis": [[1, 0, 0, 0]]}}, "tol": {"rank_rel_tol": 1}},
        {"space_dim": 1, "relations": {"T": {"basis": [[1, 0, 0, 0]]}}, "tol": {"bogus": 1}},
        {"space_dim": 1, "relations": {"T": {"basis": [[1, 0, 0, 0]]}}, "witness": {"a": "1"}},
        {"space_dim": 1, "relations": {"T": {"basis": [[1, 0, 0, 0]]}}, "witness": [1]},
    ],
)
def test_malformed(doc):
    text = doc if isinstance(doc, str) else json.dumps(doc)
    with pytest.raises(InstanceFormatError):
        loads(text)


def test_non_finite_rejected():
    with pytest.raises(InstanceFormatError):
        loads('{"space_dim": 1, "relations": {"T": {"basis": [[1, 0, NaN, 0]]}}}')


def test_dimension_mismatch_on_dump():
    with pytest.raises(InstanceFormatError):
        dumps(Instance(3, {"T": Relation.zero(2)}))


def test_format_error_is_value_error():
    assert issubclass(InstanceFormatError, ValueError)
