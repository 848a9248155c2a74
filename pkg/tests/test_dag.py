"""DAG variants, d-separation, path witnesses, and factorizations."""

from itertools import combinations

import pytest

from threebox.dag import (
    ALL_VARIANTS,
    CausalDag,
    DagVariant,
    build,
    canonical_node,
    d_separated,
    dag_from_json,
    dag_to_json,
    markov_factorization,
    open_paths,
)


def subsets(items):
    out = [()]
    for size in range(1, len(items) + 1):
        out.extend(combinations(items, size))
    return out


class TestVariants:
    def test_shorthand_round_trip(self):
        for variant in ALL_VARIANTS:
            assert DagVariant.from_shorthand(variant.shorthand) == variant

    def test_unknown_shorthand(self):
        for text in ("purist", "pure+x", "realist+po", "pure+"):
            with pytest.raises(ValueError, match="unknown variant"):
                DagVariant.from_shorthand(text)

    def test_eight_variants(self):
        assert len(set(v.shorthand for v in ALL_VARIANTS)) == 8


class TestBuild:
    def test_pure_base(self):
        g = build(DagVariant("pure"))
        assert set(g.arrows) == {("C", "M1"), ("Λ", "M1"), ("Λ", "M2")}
        assert g.kind("Λ") == "latent"
        assert g.kind("M1") == "observed"

    def test_realist_full(self):
        g = build(DagVariant("realist", outcome_arrow=True, parameter_arrow=True))
        assert set(g.arrows) == {
            ("C", "M1"), ("V", "M1"), ("Λ", "V"), ("Λ", "M2"),
            ("M1", "M2"), ("C", "M2"),
        }

    def test_realist_bare(self):
        g = build(DagVariant("realist"))
        assert len(g.arrows) == 4
        assert g.parents("C") == frozenset()
        assert "V" in g.node_names

    def test_no_direct_position_to_final_arrow_anywhere(self):
        for variant in ALL_VARIANTS:
            assert ("V", "M2") not in build(variant).arrows


class TestValidation:
    def test_choice_cannot_have_parents(self):
        with pytest.raises(ValueError, match="free choice C"):
            CausalDag(nodes=(("C", "observed"), ("M1", "observed")),
                      arrows=(("M1", "C"),))

    def test_cycle_rejected(self):
        with pytest.raises(ValueError, match="cycle"):
            CausalDag(nodes=(("M1", "observed"), ("M2", "observed")),
                      arrows=(("M1", "M2"), ("M2", "M1")))

    def test_unknown_arrow_endpoint(self):
        with pytest.raises(ValueError, match="unknown node"):
            CausalDag(nodes=(("M1", "observed"),), arrows=(("M1", "X"),))

    def test_unknown_query_node(self):
        with pytest.raises(ValueError, match="unknown node"):
            d_separated(build(DagVariant("pure")), "C", "V")

    def test_endpoint_in_conditioning_set(self):
        with pytest.raises(ValueError, match="conditioning set"):
            d_separated(build(DagVariant("pure")), "C", "M2", ("C",))


class TestDSeparation:
    def test_collider_blocks_without_arrows(self):
        g = build(DagVariant("realist"))
        assert d_separated(g, "C", "V", ("M2",))

    def test_parameter_arrow_opens(self):
        g = build(DagVariant("realist", parameter_arrow=True))
        assert not d_separated(g, "C", "V", ("M2",))

    def test_outcome_arrow_opens(self):
        g = build(DagVariant("realist", outcome_arrow=True))
        assert not d_separated(g, "C", "V", ("M2",))

    def test_direct_arrow_always_connects(self):
        for variant in ALL_VARIANTS:
            assert not d_separated(build(variant), "C", "M1")

    def test_collider_conditioning_opens(self):
        # Berkson: C and V are independent until the common effect is observed.
        g = build(DagVariant("realist"))
        assert d_separated(g, "C", "V")
        assert not d_separated(g, "C", "V", ("M1",))

    def test_latent_conditioning_is_permitted(self):
        g = build(DagVariant("pure"))
        assert d_separated(g, "C", "M2", ("M1", "Λ"))

    def test_ascii_alias_for_latent(self):
        g = build(DagVariant("pure"))
        assert not d_separated(g, "L", "M2")
        assert canonical_node("lambda") == "Λ"


class TestWitnessPaths:
    def test_parameter_arrow_witness(self):
        g = build(DagVariant("realist", parameter_arrow=True))
        rendered = [p.render() for p in open_paths(g, "V", "C", ("M2",))]
        assert rendered == ["V←Λ→M2←C"]

    def test_outcome_arrow_witness(self):
        g = build(DagVariant("realist", outcome_arrow=True))
        rendered = [p.render() for p in open_paths(g, "V", "C", ("M2",))]
        assert "V←Λ→M2←M1←C" in rendered

    def test_no_witness_when_separated(self):
        g = build(DagVariant("realist"))
        assert open_paths(g, "C", "V", ("M2",)) == ()


def test_d_separation_agrees_with_path_enumeration():
    """Exhaustive cross-check of the two independent implementations."""
    for variant in ALL_VARIANTS:
        g = build(variant)
        names = g.node_names
        for x, y in combinations(names, 2):
            rest = [n for n in names if n not in (x, y)]
            for given in subsets(rest):
                separated = d_separated(g, x, y, given)
                assert separated == (open_paths(g, x, y, given) == ()), (
                    variant.shorthand, x, y, given)


def test_d_separation_is_symmetric():
    for variant in ALL_VARIANTS:
        g = build(variant)
        names = g.node_names
        for x, y in combinations(names, 2):
            rest = [n for n in names if n not in (x, y)]
            for given in subsets(rest):
                assert d_separated(g, x, y, given) == d_separated(g, y, x, given)


def test_adding_arrows_never_creates_separation():
    """Monotonicity within each setting: more arrows, fewer separations."""
    for small in ALL_VARIANTS:
        for big in ALL_VARIANTS:
            if small.setting != big.setting or not small.red_arrows() < big.red_arrows():
                continue
            g_small, g_big = build(small), build(big)
            names = g_small.node_names
            for x, y in combinations(names, 2):
                rest = [n for n in names if n not in (x, y)]
                for given in subsets(rest):
                    if d_separated(g_big, x, y, given):
                        assert d_separated(g_small, x, y, given), (
                            small.shorthand, big.shorthand, x, y, given)


class TestFactorization:
    def test_pure_bare(self):
        f = markov_factorization(build(DagVariant("pure")))
        assert [(x.node, x.parents) for x in f.factors] == [
            ("Λ", ()), ("M1", ("C", "Λ")), ("M2", ("Λ",)),
        ]
        assert f.free_inputs == ("C",)
        assert f.render() == "P(M1,M2|C) = Σ_{Λ} P(Λ) · P(M1|C,Λ) · P(M2|Λ)"

    def test_pure_with_parameter_arrow(self):
        f = markov_factorization(build(DagVariant("pure", parameter_arrow=True)))
        assert [(x.node, x.parents) for x in f.factors] == [
            ("Λ", ()), ("M1", ("C", "Λ")), ("M2", ("C", "Λ")),
        ]

    def test_realist_with_parameter_arrow(self):
        f = markov_factorization(build(DagVariant("realist", parameter_arrow=True)))
        assert [(x.node, x.parents) for x in f.factors] == [
            ("Λ", ()), ("V", ("Λ",)), ("M1", ("C", "V")), ("M2", ("C", "Λ")),
        ]
        assert f.latents == ("Λ", "V")

    def test_realist_with_outcome_arrow(self):
        f = markov_factorization(build(DagVariant("realist", outcome_arrow=True)))
        assert ("M2", ("Λ", "M1")) in [(x.node, x.parents) for x in f.factors]


class TestJson:
    def test_round_trip(self):
        for variant in ALL_VARIANTS:
            g = build(variant)
            assert dag_from_json(dag_to_json(g)) == g

    def test_format_shape(self):
        text = dag_to_json(build(DagVariant("pure")))
        assert '"name": "C"' in text
        assert '"kind": "observed"' in text
        assert '"Λ"' in text

    def test_malformed_rejected(self):
        with pytest.raises(ValueError, match="JSON"):
            dag_from_json("not json")
        with pytest.raises(ValueError, match="keys"):
            dag_from_json('{"nodes": []}')
