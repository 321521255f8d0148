"""Instance builders and realizability dispatch."""

import random

import pytest

from qlq.constructions import (
    ConstructedInstance,
    PreconditionFailed,
    RealizabilityRequest,
    UnknownName,
    build_generic_slot,
    build_tensor_family,
    build_tensor_family2,
    canned,
    realize,
    verify_expected,
)
from qlq.field_tower import rational_tower
from qlq.forms import QuasilinearForm, binary, pfister, tensor
from qlq.function_field import i0_over
from qlq.invariants import divides, izhboldin_dim, lndeg, norm_form
from qlq.theorems import verify_instance


def test_canned_examples():
    g4 = canned("generic", 4)
    assert g4.dim == 4 and lndeg(g4) == 3
    qp = canned("quasi_pfister", 2)
    assert qp.dim == 4 and izhboldin_dim(qp) == 2
    nb = canned("qp_neighbour", 2, 3)
    assert nb.dim == 3
    from qlq.invariants import delta

    assert delta(nb).members == {0, 1}
    assert canned("splitting_demo", 2).dim == 4
    with pytest.raises(UnknownName):
        canned("nonsense")
    with pytest.raises(UnknownName):
        canned("qp_neighbour", 2, 2)  # dimension must exceed 2^(n-1)


def test_generic_slot_examples(xy_tower):
    x, y, one = xy_tower.var("x"), xy_tower.var("y"), xy_tower.one()
    tau = QuasilinearForm(xy_tower, (one,))
    phi = binary(xy_tower, x)
    inst = build_generic_slot(tau, phi, phi)
    assert inst.expected["k"] == 1
    assert inst.p.dim == 3 and inst.q.dim == 3
    inst = build_generic_slot(binary(xy_tower, x), pfister(xy_tower, [x, y]),
                       pfister(xy_tower, [x, y]))
    assert inst.expected["k"] == 2


def test_generic_slot_izh_is_dim_phi(xy_tower):
    x, y, one = xy_tower.var("x"), xy_tower.var("y"), xy_tower.one()
    inst = build_generic_slot(QuasilinearForm(xy_tower, (one,)),
                       QuasilinearForm(xy_tower, (one, x, y)),
                       QuasilinearForm(xy_tower, (one, x, y)))
    assert inst.expected["izh"] == 3
    assert i0_over(inst.p, inst.p) == 1  # i_1(p) = 1


def test_generic_slot_precondition(xy_tower):
    x, y = xy_tower.var("x"), xy_tower.var("y")
    with pytest.raises(PreconditionFailed):
        build_generic_slot(binary(xy_tower, x), binary(xy_tower, y),
                    binary(xy_tower, y))


def test_tensor_family_small():
    E, pi, tau, phi = build_tensor_family(0, 1, 1)
    assert tau.dim == 1 and phi.dim == 1
    E, pi, tau, phi = build_tensor_family(1, 1, 2)
    assert (tau.dim, phi.dim) == (2, 4)
    assert divides(pi, tau) and divides(pi, phi)
    from qlq.forms import anisotropic_part

    assert anisotropic_part(tensor(tau, phi)).dim <= (1 + 2 - 1) << 1


def test_tensor_family_lndeg():
    # v*2^r = 2^n with u*2^r > 2^(n-2) gives lndeg = n, else n + 1
    E, pi, tau, phi = build_tensor_family(1, 1, 2)
    assert lndeg(phi) == 2
    E, pi, tau, phi = build_tensor_family(0, 1, 4)
    assert lndeg(phi) == 3


def test_tensor_family2():
    E, tau, pi = build_tensor_family2(2, 1, 1, branch=1)
    assert tau.dim == 2 and pi.dim == 2
    E, tau, phi = build_tensor_family2(3, 1, 2, d=4, branch=2)
    assert tau.dim == 3 and phi.dim == 4
    assert lndeg(phi) == 3
    with pytest.raises(PreconditionFailed):
        build_tensor_family2(9, 1, 2, branch=1)


def test_realize_branch2():
    for eps, dim_q in ((1, 9), (-1, 7)):
        inst = realize(RealizabilityRequest(2, 4, 1, 1, eps, 2))
        assert inst.q.dim == dim_q
        assert inst.expected["k"] == 1 and inst.expected["izh"] == 4
        assert inst.expected["qp_flag"] is True


def test_realize_branch3():
    for eps, dim_q in ((1, 17), (-1, 15)):
        inst = realize(RealizabilityRequest(2, 5, 1, 1, eps, 3))
        assert inst.q.dim == dim_q
        assert inst.expected["izh"] == 5
        assert inst.expected["qp_flag"] is False


def test_realize_branch1():
    inst = realize(RealizabilityRequest(2, 4, 4, 3, 0, 1))
    assert inst.expected["k"] == 4
    assert inst.q.dim == 4 + 2 * 3


def test_realize_branch4_windows():
    inst = realize(RealizabilityRequest(2, 4, 3, 0, 5, 4))
    assert inst.q.dim == 5 and inst.expected["izh"] == 4
    inst = realize(RealizabilityRequest(2, 4, 3, 1, -5, 4))
    assert inst.q.dim == 11
    with pytest.raises(PreconditionFailed):
        realize(RealizabilityRequest(2, 4, 1, 0, 5, 4))  # k below the window


def test_realize_branch5_window():
    inst = realize(RealizabilityRequest(2, 5, 4, 0, 8, 5))
    assert inst.q.dim == 8 and inst.expected["izh"] == 5


def test_realized_instances_pass_all_checkers():
    for req in (RealizabilityRequest(2, 4, 1, 1, 1, 2),
                RealizabilityRequest(2, 5, 1, 1, -1, 3)):
        inst = realize(req)
        rep = verify_instance(inst.p, inst.q)
        assert rep["status"] != "violation"


def test_instance_json_roundtrip(tmp_path):
    import json

    from qlq.cli import parse_element, tower_from_json

    inst = realize(RealizabilityRequest(2, 4, 1, 1, 1, 2))
    data = inst.to_json()
    blob = json.dumps(data, sort_keys=True)
    back = json.loads(blob)
    tower = tower_from_json(back["tower"])
    assert tower.same_presentation(inst.tower)
    # the q text parses back to the same entries
    from qlq.cli import _split_diag

    entries = [parse_element(t, tower) for t in _split_diag(back["q"])]
    assert len(entries) == inst.q.dim
    for a, b in zip(entries, inst.q.entries):
        assert a == b
