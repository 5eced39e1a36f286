"""Smoke test for the `jalg` extension module.

Build and install with `pip install ./crates/py` (maturin backend),
or point PYTHONPATH at a directory holding the built `jalg` shared library.
"""

import jalg


def main():
    b = jalg.Algebra.boolean()
    assert b.size == 2
    assert len(b.homomorphisms(3)) == 3

    classical = jalg.Logic.classical()
    assert classical.entails(["x1", "(not (or (not x1) x2))"], "(not x2)")
    assert classical.interderivable("x1", "(not (not x1))")

    agenda = jalg.Agenda(classical, ["x1", "x2", "(or x1 x2)", "(not x1)"])
    assert agenda.pseudo_richness() == 2
    deltas, attitude = agenda.lemma1([1, 0])
    assert [attitude[d] for d in deltas] == [1, 0]
    assert agenda.is_rational(attitude) is not None

    for n in (1, 2, 3):
        report = jalg.verify(agenda, n)
        assert report["homs"] == report["aggregators"] == n
        assert report["roundtrips"] == "pass"

    l3 = jalg.Logic.lukasiewicz(3, degree=True)
    report = jalg.verify(jalg.Agenda(l3, ["x1", "x2", "(oplus x1 x2)"]), 2)
    assert report["homs"] == report["aggregators"]
    assert report["roundtrips"] == "pass"

    majority = [int(bin(c).count("1") >= 2) for c in range(8)]
    verdict = jalg.classify_dictator(majority, 3)
    assert verdict["dictator"] is None and not verdict["ultrafilter"]
    dilemma = jalg.Agenda(classical, ["x1", "x2", "(or x1 x2)"])
    profile, output = jalg.irrational_witness(dilemma, majority, 3)
    assert all(dilemma.is_rational(a) is not None for a in profile)
    assert dilemma.is_rational(output) is None

    dietrich = jalg.check_dietrich(2)
    assert (dietrich["a"], dietrich["b"], dietrich["material_b"]) == ("pass", "pass", "fail")

    selfext = jalg.Logic.lukasiewicz(3).check_selfext(1, 2)
    assert not selfext["selfextensional"]
    assert selfext["witness"]["connective"] == "not"

    print("jalg", jalg.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
