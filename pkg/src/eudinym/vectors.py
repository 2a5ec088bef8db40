"""Deterministic conformance vectors.

Every suite is derived from :class:`~eudinym.groups.DeterministicRng` with a
fixed seed, so output is byte-identical across runs and platforms.
"""

from __future__ import annotations

import json

from . import bbs
from .bbs import PresentationMode
from .commitments import PseudonymSeed, commit_hash, commit_pedersen
from .groups import DeterministicRng, G1_GENERATOR, random_scalar, scalar_to_bytes
from .prf import dy_nym, encode_prf_input, hashdh_nym, hmac_nym
from .sigma import Transcript, prove_dlog

SUITES = ("commitments", "hmac", "hashdh", "dy", "proofs")
SCOPES = ("rp.example", "shop.example", "https://forum.example/login")
COUNT = 8


def _seeds(label: str, n: int = COUNT) -> list[PseudonymSeed]:
    rng = DeterministicRng(f"vectors/{label}")
    return [PseudonymSeed.generate(rng) for _ in range(n)]


def _commitments() -> list[dict]:
    rng = DeterministicRng("vectors/commitments/nonce")
    out = []
    for seed in _seeds("commitments"):
        nonce = rng.token_bytes(32)
        nonce_scalar = random_scalar(rng)
        out.append({
            "seed": seed.secret.hex(),
            "seed_scalar": scalar_to_bytes(seed.scalar).hex(),
            "nonce": nonce.hex(),
            "hash_commitment": commit_hash(seed, nonce).value.hex(),
            "nonce_scalar": scalar_to_bytes(nonce_scalar).hex(),
            "pedersen_commitment": commit_pedersen(seed.scalar, nonce_scalar).value.to_bytes().hex(),
        })
    return out


def _prf_vectors(label: str, derive) -> list[dict]:
    out = []
    for i, seed in enumerate(_seeds(label)):
        scope = SCOPES[i % len(SCOPES)]
        idx = i % 4 + (0 if label == "hmac" else 1)
        nym = derive(seed, scope, idx)
        out.append({
            "seed": seed.secret.hex(),
            "seed_scalar": scalar_to_bytes(seed.scalar).hex(),
            "scope": scope,
            "index": idx,
            "prf_input": encode_prf_input(scope, idx).hex(),
            "nym": nym.value_bytes().hex(),
        })
    return out


def _proofs() -> list[dict]:
    rng = DeterministicRng("vectors/proofs")
    kp = bbs.keygen(4, ["age_over_18", "expiry"], rng)
    seed = PseudonymSeed.generate(rng)
    req, state = bbs.blind_issuance_request(seed, random_scalar(rng), kp.public, rng)
    sig = bbs.blind_sign(kp, req, {"age_over_18": "true", "expiry": "2031-01-01"}, rng)
    cred = bbs.unblind(kp.public, sig, state)
    out = []
    w = random_scalar(rng)
    proof = prove_dlog(w, G1_GENERATOR, w * G1_GENERATOR, Transcript("dlog", b"vector"), rng)
    out.append({
        "kind": "dlog",
        "public": (w * G1_GENERATOR).to_bytes().hex(),
        "session_context": b"vector".hex(),
        "proof": proof.to_bytes().hex(),
    })
    for mode, idx, bound in ((PresentationMode.HASHDH, 1, None), (PresentationMode.DY, 2, 4),
                             (PresentationMode.NONE, 0, None)):
        ctx = f"session-{mode.name.lower()}".encode()
        p = bbs.present(kp.public, cred, ["age_over_18"], "rp.example", idx, mode, ctx, bound, rng)
        out.append({
            "kind": f"presentation-{mode.name.lower()}",
            "issuer_public": kp.public.to_bytes().hex(),
            "scope": "rp.example",
            "bound": bound,
            "session_context": ctx.hex(),
            "proof": p.to_bytes().hex(),
        })
    return out


def generate(suite: str) -> dict:
    if suite == "commitments":
        entries = _commitments()
    elif suite == "hmac":
        entries = _prf_vectors("hmac", lambda s, scp, i: hmac_nym(s, scp, i))
    elif suite == "hashdh":
        entries = _prf_vectors("hashdh", lambda s, scp, i: hashdh_nym(s.scalar, scp, i))
    elif suite == "dy":
        entries = _prf_vectors("dy", lambda s, scp, i: dy_nym(s.scalar, scp, i))
    elif suite == "proofs":
        entries = _proofs()
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return {"suite": suite, "version": 1, "vectors": entries}


def dumps(suite: str) -> bytes:
    return (json.dumps(generate(suite), sort_keys=True, indent=1) + "\n").encode()
