import random

import pytest

import oracles as O
from pfgx import kernel as K

SIG = O.TWO_CONST_SIG
C, F = K.Prim(0), K.Prim(1)


def sig_with_prop_prim():
    return K.Signature(bases=1, prims=(K.PROP,))


class TestTypecheck:
    def test_identity_function(self):
        assert K.typecheck(SIG, [], K.La(K.SET, K.DB(0))) == K.Func(K.SET, K.SET)

    def test_imp_of_quantified_props(self):
        t = K.Imp(K.All(K.PROP, K.DB(0)), K.All(K.PROP, K.DB(0)))
        assert K.typecheck(SIG, [], t) == K.PROP

    def test_ill_typed_application(self):
        sig = sig_with_prop_prim()
        with pytest.raises(K.TypeMismatch):
            K.typecheck(sig, [], K.Ap(K.La(K.SET, K.DB(0)), K.Prim(0)))

    def test_unbound_variable(self):
        with pytest.raises(K.UnboundVariable):
            K.typecheck(SIG, [], K.DB(0))

    def test_unknown_ref_and_prim(self):
        with pytest.raises(K.UnknownRef):
            K.typecheck(SIG, [], K.Ref(b"\x00" * 32))
        with pytest.raises(K.UnknownRef):
            K.typecheck(SIG, [], K.Prim(9))

    def test_base_index_outside_theory(self):
        with pytest.raises(K.UnknownRef):
            K.typecheck(SIG, [], K.La(K.Base(3), K.DB(0)))

    def test_imp_requires_props(self):
        with pytest.raises(K.TypeMismatch):
            K.typecheck(SIG, [], K.Imp(C, C))


class TestNormalize:
    def test_beta(self):
        assert K.normalize(SIG, K.Ap(K.La(K.SET, K.DB(0)), C)) == C

    def test_eta(self):
        assert K.normalize(SIG, K.La(K.SET, K.Ap(F, K.DB(0)))) == F

    def test_eta_does_not_capture(self):
        # La x. (x x') shape where the function mentions the bound variable
        t = K.La(K.Func(K.SET, K.SET), K.Ap(K.DB(0), K.Ap(K.DB(0), C)))
        assert K.normalize(SIG, t) == t

    def test_unfold_requires_known_ref(self):
        with pytest.raises(K.UnknownRef):
            K.normalize(SIG, K.Ref(b"\x11" * 32), unfold=True)

    def test_delta_unfold(self):
        body = K.La(K.SET, K.DB(0))
        oid = K.term_id(body)
        sig = SIG.copy()
        sig.defs[oid] = K.Def(K.Func(K.SET, K.SET), body)
        assert K.normalize(sig, K.Ap(K.Ref(oid), C), unfold=True) == C
        # without unfold the Ref is opaque
        assert K.normalize(sig, K.Ap(K.Ref(oid), C)) == K.Ap(K.Ref(oid), C)


class TestConv:
    def test_reflexive(self):
        t = K.La(K.SET, K.Ap(F, K.Ap(F, K.DB(0))))
        assert K.conv(SIG, t, t)

    def test_beta_conv(self):
        assert K.conv(SIG, K.Ap(K.La(K.SET, K.DB(0)), C), C)

    def test_delta_conv(self):
        body = K.Ap(F, C)
        oid = K.term_id(body)
        sig = SIG.copy()
        sig.defs[oid] = K.Def(K.SET, body)
        assert K.conv(sig, K.Ref(oid), body)

    def test_distinct_constants_not_conv(self):
        assert not K.conv(SIG, C, K.Ap(F, C))


class TestExtProp:
    def test_instance_structure_set_set(self):
        got = K.ext_prop(K.SET, K.SET)
        fty = K.Func(K.SET, K.SET)
        pointwise = K.All(
            K.SET,
            K.All(
                K.Func(K.SET, K.PROP),
                K.Imp(
                    K.Ap(K.DB(0), K.Ap(K.DB(3), K.DB(1))),
                    K.Ap(K.DB(0), K.Ap(K.DB(2), K.DB(1))),
                ),
            ),
        )
        concl = K.All(
            K.Func(fty, K.PROP), K.Imp(K.Ap(K.DB(0), K.DB(2)), K.Ap(K.DB(0), K.DB(1)))
        )
        assert got == K.All(fty, K.All(fty, K.Imp(pointwise, concl)))

    def test_instance_set_prop(self):
        got = K.ext_prop(K.SET, K.PROP)
        assert isinstance(got, K.All) and got.dom == K.Func(K.SET, K.PROP)

    @pytest.mark.parametrize(
        "dom,cod",
        [
            (K.SET, K.SET),
            (K.SET, K.PROP),
            (K.PROP, K.SET),
            (K.Func(K.SET, K.SET), K.PROP),
            (K.PROP, K.Func(K.SET, K.PROP)),
        ],
    )
    def test_always_a_proposition(self, dom, cod):
        assert K.typecheck(SIG, [], K.ext_prop(dom, cod)) == K.PROP

    def test_proved_by_ext_node(self):
        assert K.check_proof(SIG, [], K.Ext(K.SET, K.SET)) == K.normalize(
            SIG, K.ext_prop(K.SET, K.SET)
        )


class TestCheckProof:
    def test_identity_derivation(self):
        p = K.All(K.PROP, K.DB(0))
        got = K.check_proof(SIG, [], K.PrLa(p, K.Hyp(0)))
        assert got == K.Imp(p, p)

    def test_forall_intro(self):
        # with Q : set -> prop, prove all x. Q x -> Q x
        sig = K.Signature(bases=1, prims=(K.Func(K.SET, K.PROP),))
        q = K.Ap(K.Prim(0), K.DB(0))
        proof = K.TmLa(K.SET, K.PrLa(q, K.Hyp(0)))
        assert K.check_proof(sig, [], proof) == K.All(K.SET, K.Imp(q, q))

    def test_modus_ponens_and_forall_elim(self):
        # from all x. Q x conclude Q c
        sig = K.Signature(bases=1, prims=(K.SET, K.Func(K.SET, K.PROP)))
        univ = K.All(K.SET, K.Ap(K.Prim(1), K.DB(0)))
        got = K.check_proof(sig, [univ], K.TmAp(K.Hyp(0), K.Prim(0)))
        assert got == K.Ap(K.Prim(1), K.Prim(0))

    def test_hypotheses_shift_under_term_binder(self):
        # hypothesis mentions no variables; under allintro it must still apply
        sig = K.Signature(bases=1, prims=(K.Func(K.SET, K.PROP),))
        hyp = K.All(K.SET, K.Ap(K.Prim(0), K.DB(0)))
        proof = K.TmLa(K.SET, K.TmAp(K.Hyp(0), K.DB(0)))
        got = K.check_proof(sig, [hyp], proof)
        assert got == K.All(K.SET, K.Ap(K.Prim(0), K.DB(0)))

    def test_errors(self):
        with pytest.raises(K.BadHyp):
            K.check_proof(SIG, [], K.Hyp(0))
        with pytest.raises(K.UnknownKnown):
            K.check_proof(SIG, [], K.Known(b"\x01" * 32))
        with pytest.raises(K.NotAnImplication):
            K.check_proof(SIG, [K.All(K.PROP, K.DB(0))], K.PrAp(K.Hyp(0), K.Hyp(0)))
        with pytest.raises(K.NotAForall):
            p = K.Imp(K.All(K.PROP, K.DB(0)), K.All(K.PROP, K.DB(0)))
            K.check_proof(SIG, [p], K.TmAp(K.Hyp(0), C))
        with pytest.raises(K.IllTypedWitness):
            K.check_proof(SIG, [K.All(K.SET, K.All(K.PROP, K.DB(0)))], K.TmAp(K.Hyp(0), K.La(K.SET, K.DB(0))))
        with pytest.raises(K.ConvFailure):
            imp = K.Imp(K.All(K.PROP, K.DB(0)), K.All(K.PROP, K.DB(0)))
            top = K.All(K.PROP, K.Imp(K.DB(0), K.DB(0)))
            K.check_proof(SIG, [imp, top], K.PrAp(K.Hyp(0), K.Hyp(1)))
        with pytest.raises(K.BadHyp):
            K.check_proof(SIG, [], K.PrLa(C, K.Hyp(0)))  # assumption not a Prop

    def test_returns_normal_form(self):
        redex = K.Ap(K.La(K.PROP, K.Imp(K.DB(0), K.DB(0))), K.All(K.PROP, K.DB(0)))
        got = K.check_proof(SIG, [redex], K.Hyp(0))
        bot = K.All(K.PROP, K.DB(0))
        assert got == K.Imp(bot, bot)


class TestIds:
    def test_term_id_of_identity_matches_reference(self):
        ident = K.La(K.SET, K.DB(0))
        assert K.term_id(ident) == O.ref_term_id(K.normalize(None, ident))
        assert (
            K.term_id(ident).hex()
            == "a05e0fd883eb67f30f4ef0b6d053db6d166184f7d00fa3594b7aa425839a6d28"
        )

    def test_not_closed(self):
        with pytest.raises(K.NotClosed):
            K.term_id(K.DB(0))

    def test_ill_typed_with_signature(self):
        with pytest.raises(K.IllTyped):
            K.term_id(K.Ap(C, C), SIG)

    def test_id_invariant_under_beta_eta_expansion(self):
        rng = random.Random(42)
        for _ in range(60):
            t, ty = O.random_well_typed(rng)
            base = K.term_id(t)
            wrapped = t
            for _ in range(rng.randint(1, 3)):
                wrapped = K.Ap(K.La(ty, K.DB(0)), wrapped)  # beta-expansion
            assert K.term_id(wrapped) == base
            if isinstance(ty, K.Func):
                eta = K.La(ty.dom, K.Ap(K.shift(t, 1), K.DB(0)))
                assert K.term_id(eta) == base

    def test_theory_id_matches_reference(self):
        from pfgx import corpus

        spec = corpus.hf_spec()
        nf = [K.normalize(None, t) for _, t in spec.axioms]
        assert corpus.hf_id() == O.ref_theory_id(
            spec.bases, [ty for _, ty in spec.prims], nf
        )


class TestSubjectReduction:
    def test_well_typed_fixtures_keep_types(self):
        rng = random.Random(7)
        for _ in range(200):
            t, ty = O.random_well_typed(rng)
            assert K.typecheck(SIG, [], t) == ty
            nf = K.normalize(SIG, t)
            assert K.typecheck(SIG, [], nf) == ty

    def test_enumerated_terms_keep_types(self):
        for t, ty in O.closed_terms_up_to(5):
            assert K.typecheck(SIG, [], K.normalize(SIG, t)) == ty


class TestSerialization:
    def test_round_trip_terms(self):
        rng = random.Random(3)
        from pfgx.serial import Reader

        for _ in range(100):
            t, _ = O.random_well_typed(rng)
            assert K.deser_term(Reader(K.ser_term(t))) == t

    def test_reference_serializer_agrees(self):
        rng = random.Random(4)
        for _ in range(100):
            t, _ = O.random_well_typed(rng)
            assert K.ser_term(t) == O.ref_ser_term(t)

    def test_proof_round_trip(self):
        from pfgx.serial import Reader

        p = K.TmLa(K.SET, K.PrLa(K.Ap(K.Prim(1), K.DB(0)), K.PrAp(K.Hyp(0), K.Known(b"\x07" * 32))))
        assert K.deser_proof(Reader(K.ser_proof(p))) == p
