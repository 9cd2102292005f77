#!/usr/bin/env python3
"""Generates the frozen known-answer vectors used by the crypto test suites.

SHA-256 digests come from hashlib, AES-256-GCM vectors from the pyca
`cryptography` package, and the ECDSA / scalar-multiplication vectors from a
small self-contained P-256 implementation below (cross-checked against pyca
verification before being written out). Re-running the script rewrites the
JSON files in place; the outputs are committed so the C++ tests never depend
on Python at build time.
"""

import hashlib
import json
import os

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ec, utils
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

OUT_DIR = os.path.dirname(os.path.abspath(__file__))

# ---------------------------------------------------------------- P-256 math

P = 0xFFFFFFFF00000001000000000000000000000000FFFFFFFFFFFFFFFFFFFFFFFF
A = P - 3
B = 0x5AC635D8AA3A93E7B3EBBD55769886BC651D06B0CC53B0F63BCE3C3E27D2604B
GX = 0x6B17D1F2E12C4247F8BCE6E563A440F277037D812DEB33A0F4A13945D898C296
GY = 0x4FE342E2FE1A7F9B8EE7EB4A7C0F9E162BCE33576B315ECECBB6406837BF51F5
N = 0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551


def ec_add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    (x1, y1), (x2, y2) = p1, p2
    if x1 == x2 and (y1 + y2) % P == 0:
        return None
    if p1 == p2:
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, P) % P
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, P) % P
    x3 = (lam * lam - x1 - x2) % P
    y3 = (lam * (x1 - x3) - y1) % P
    return (x3, y3)


def ec_mul(k, point):
    result = None
    addend = point
    while k:
        if k & 1:
            result = ec_add(result, addend)
        addend = ec_add(addend, addend)
        k >>= 1
    return result


def ecdsa_sign(d, digest, k):
    e = int.from_bytes(digest, "big") % N
    x_r, _ = ec_mul(k, (GX, GY))
    r = x_r % N
    s = pow(k, -1, N) * (e + r * d) % N
    assert r != 0 and s != 0
    return r, s


def det_scalar(label):
    """Deterministic test scalar in [1, n-1] derived from a label string."""
    return int.from_bytes(hashlib.sha256(label.encode()).digest(), "big") % N


def hx(b):
    return b.hex()


# ------------------------------------------------------------------- SHA-256

sha_inputs = [
    ("empty", b""),
    ("abc", b"abc"),
    ("two_blocks", b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"),
    ("million_a_prefix", b"a" * 1000),
    ("binary_ramp", bytes(range(256)) * 4),
    # Block hash preimages in the chain's on-wire form.
    ("genesis_preimage", b"0|1700000000000||"),
    (
        "block1_preimage",
        b"1|1700000000001|"
        + hashlib.sha256(b"0|1700000000000||").hexdigest().encode()
        + b"|sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
    ),
]
sha_vectors = [
    {"name": name, "input": hx(data), "digest": hashlib.sha256(data).hexdigest()}
    for name, data in sha_inputs
]

# -------------------------------------------------------------- AES-256-GCM

def gcm_vector(name, key, iv, pt, aad):
    sealed = AESGCM(key).encrypt(iv, pt, aad if aad else None)
    ct, tag = sealed[:-16], sealed[-16:]
    return {
        "name": name,
        "key": hx(key),
        "iv": hx(iv),
        "plaintext": hx(pt),
        "aad": hx(aad),
        "ciphertext": hx(ct),
        "tag": hx(tag),
    }


rnd = hashlib.sha256
gcm_vectors = [
    gcm_vector("empty_zero", bytes(32), bytes(12), b"", b""),
    gcm_vector(
        "short_with_aad",
        rnd(b"gcm key 1").digest(),
        rnd(b"gcm iv 1").digest()[:12],
        b"hello",
        b"header",
    ),
    gcm_vector(
        "block_aligned",
        rnd(b"gcm key 2").digest(),
        rnd(b"gcm iv 2").digest()[:12],
        (rnd(b"gcm pt a").digest() + rnd(b"gcm pt b").digest()),  # 64 bytes
        b"",
    ),
    gcm_vector(
        "unaligned_47",
        rnd(b"gcm key 3").digest(),
        rnd(b"gcm iv 3").digest()[:12],
        (rnd(b"gcm pt c").digest() + rnd(b"gcm pt d").digest())[:47],
        rnd(b"gcm aad 3").digest()[:9],
    ),
    gcm_vector(
        "kib_payload",
        rnd(b"gcm key 4").digest(),
        rnd(b"gcm iv 4").digest()[:12],
        b"".join(rnd(b"gcm pt e%d" % i).digest() for i in range(32)),  # 1024 bytes
        b"DESTBLK1\x01",
    ),
]

# --------------------------------------------------------------- AES-256 ECB

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

def ecb_vector(name, key, pt):
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return {"name": name, "key": hx(key), "plaintext": hx(pt),
            "ciphertext": hx(enc.update(pt) + enc.finalize())}

ecb_vectors = [
    # The FIPS-197 appendix C.3 example block.
    ecb_vector("fips197_c3", bytes(range(32)), bytes.fromhex("00112233445566778899aabbccddeeff")),
    ecb_vector("det_block", rnd(b"ecb key").digest(), rnd(b"ecb pt").digest()[:16]),
]

# ------------------------------------------------------- scalar multiplication

mul_scalars = [
    ("one", 1),
    ("two", 2),
    ("three", 3),
    ("det_a", det_scalar("scalar mult vector a")),
    ("det_b", det_scalar("scalar mult vector b")),
    ("n_minus_1", N - 1),
]
mul_vectors = []
for name, k in mul_scalars:
    x, y = ec_mul(k, (GX, GY))
    mul_vectors.append(
        {"name": name, "k": "%064x" % k, "x": "%064x" % x, "y": "%064x" % y}
    )

# --------------------------------------------------------------------- ECDSA

ecdsa_vectors = []
for idx, (key_label, msg) in enumerate(
    [
        ("ecdsa key 1", b"sample block payload"),
        ("ecdsa key 2", b"0|1700000000000||"),
        ("ecdsa key 3", b"another co-signed record"),
    ]
):
    d = det_scalar(key_label)
    k = det_scalar("nonce for %s" % key_label)
    digest = hashlib.sha256(msg).digest()
    r, s = ecdsa_sign(d, digest, k)
    qx, qy = ec_mul(d, (GX, GY))

    # Cross-check the signature with an independent verifier before freezing.
    pub = ec.EllipticCurvePublicNumbers(qx, qy, ec.SECP256R1()).public_key()
    pub.verify(
        utils.encode_dss_signature(r, s),
        digest,
        ec.ECDSA(utils.Prehashed(hashes.SHA256())),
    )

    ecdsa_vectors.append(
        {
            "name": "vector_%d" % (idx + 1),
            "d": "%064x" % d,
            "qx": "%064x" % qx,
            "qy": "%064x" % qy,
            "digest": digest.hex(),
            "k": "%064x" % k,
            "r": "%064x" % r,
            "s": "%064x" % s,
        }
    )


def dump(filename, obj):
    path = os.path.join(OUT_DIR, filename)
    with open(path, "w") as f:
        json.dump(obj, f, indent=1)
        f.write("\n")
    print("wrote", path)


dump("sha256_kat.json", sha_vectors)
dump("aes256gcm_kat.json", gcm_vectors)
dump("aes256ecb_kat.json", ecb_vectors)
dump("p256_mul_kat.json", mul_vectors)
dump("ecdsa_p256_kat.json", ecdsa_vectors)
