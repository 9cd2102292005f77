#pragma once

#include "destine/crypto/uint256.hpp"

namespace destine::crypto::p256 {

// NIST P-256 (secp256r1): y^2 = x^3 - 3x + b over GF(p), prime group order n.

inline const MontCtx& field() {
  static const MontCtx ctx(U256::from_hex(
      "ffffffff00000001000000000000000000000000ffffffffffffffffffffffff"));
  return ctx;
}

inline const MontCtx& order() {
  static const MontCtx ctx(U256::from_hex(
      "ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551"));
  return ctx;
}

inline const U256& order_value() { return order().modulus(); }

// Affine point in plain (non-Montgomery) coordinates.
struct Affine {
  U256 x;
  U256 y;
  bool infinity = false;
};

inline Affine generator() {
  return Affine{
      U256::from_hex("6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"),
      U256::from_hex("4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5"),
      false};
}

namespace detail {

// Jacobian coordinates in Montgomery form.
struct Jac {
  U256 x, y, z;
  bool infinity = true;
};

struct Consts {
  U256 b_mont;
  U256 three_mont;
  Consts() {
    const MontCtx& f = field();
    b_mont = f.to_mont(U256::from_hex(
        "5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b"));
    U256 one = f.one_mont();
    three_mont = f.add(f.add(one, one), one);
  }
};

inline const Consts& consts() {
  static const Consts c;
  return c;
}

inline Jac from_affine(const Affine& a) {
  if (a.infinity) return Jac{};
  const MontCtx& f = field();
  return Jac{f.to_mont(a.x), f.to_mont(a.y), f.one_mont(), false};
}

inline Affine to_affine(const Jac& j) {
  if (j.infinity) return Affine{{}, {}, true};
  const MontCtx& f = field();
  U256 zinv = f.inverse(j.z);
  U256 zinv2 = f.mul(zinv, zinv);
  return Affine{f.from_mont(f.mul(j.x, zinv2)),
                f.from_mont(f.mul(j.y, f.mul(zinv2, zinv))), false};
}

// dbl-2001-b, specialised for a = -3.
inline Jac dbl(const Jac& p) {
  if (p.infinity || p.y.is_zero()) return Jac{};
  const MontCtx& f = field();
  U256 delta = f.mul(p.z, p.z);
  U256 gamma = f.mul(p.y, p.y);
  U256 beta = f.mul(p.x, gamma);
  U256 alpha = f.mul(f.sub(p.x, delta), f.add(p.x, delta));
  alpha = f.add(f.add(alpha, alpha), alpha);
  U256 beta4 = f.add(f.add(beta, beta), f.add(beta, beta));
  U256 x3 = f.sub(f.mul(alpha, alpha), f.add(beta4, beta4));
  U256 yz = f.add(p.y, p.z);
  U256 z3 = f.sub(f.sub(f.mul(yz, yz), gamma), delta);
  U256 gamma2 = f.mul(gamma, gamma);
  U256 gamma8 = f.add(gamma2, gamma2);
  gamma8 = f.add(gamma8, gamma8);
  gamma8 = f.add(gamma8, gamma8);
  U256 y3 = f.sub(f.mul(alpha, f.sub(beta4, x3)), gamma8);
  return Jac{x3, y3, z3, false};
}

// add-2007-bl, general Jacobian addition.
inline Jac add(const Jac& p, const Jac& q) {
  if (p.infinity) return q;
  if (q.infinity) return p;
  const MontCtx& f = field();
  U256 z1z1 = f.mul(p.z, p.z);
  U256 z2z2 = f.mul(q.z, q.z);
  U256 u1 = f.mul(p.x, z2z2);
  U256 u2 = f.mul(q.x, z1z1);
  U256 s1 = f.mul(p.y, f.mul(q.z, z2z2));
  U256 s2 = f.mul(q.y, f.mul(p.z, z1z1));
  if (u1 == u2) {
    if (s1 == s2) return dbl(p);
    return Jac{};
  }
  U256 h = f.sub(u2, u1);
  U256 h2 = f.add(h, h);
  U256 i = f.mul(h2, h2);
  U256 j = f.mul(h, i);
  U256 r = f.sub(s2, s1);
  r = f.add(r, r);
  U256 v = f.mul(u1, i);
  U256 x3 = f.sub(f.sub(f.mul(r, r), j), f.add(v, v));
  U256 s1j = f.mul(s1, j);
  U256 y3 = f.sub(f.mul(r, f.sub(v, x3)), f.add(s1j, s1j));
  U256 zz = f.add(p.z, q.z);
  U256 z3 = f.mul(f.sub(f.sub(f.mul(zz, zz), z1z1), z2z2), h);
  return Jac{x3, y3, z3, false};
}

inline Jac scalar_mul_jac(const U256& k, const Affine& pt) {
  Jac base = from_affine(pt);
  Jac acc{};
  for (int i = 255; i >= 0; --i) {
    acc = dbl(acc);
    if (k.bit(i)) acc = add(acc, base);
  }
  return acc;
}

}  // namespace detail

inline bool on_curve(const Affine& a) {
  if (a.infinity) return false;
  const MontCtx& f = field();
  if (!(a.x < f.modulus()) || !(a.y < f.modulus())) return false;
  U256 x = f.to_mont(a.x);
  U256 y = f.to_mont(a.y);
  U256 rhs = f.add(f.mul(x, f.sub(f.mul(x, x), detail::consts().three_mont)),
                   detail::consts().b_mont);
  return f.mul(y, y) == rhs;
}

inline Affine scalar_mul(const U256& k, const Affine& pt) {
  return detail::to_affine(detail::scalar_mul_jac(k, pt));
}

inline Affine scalar_mul_base(const U256& k) { return scalar_mul(k, generator()); }

inline Affine add_points(const Affine& a, const Affine& b) {
  return detail::to_affine(detail::add(detail::from_affine(a), detail::from_affine(b)));
}

// u1*G + u2*Q, the ECDSA verification combination.
inline Affine double_scalar_mul(const U256& u1, const U256& u2, const Affine& q) {
  detail::Jac sum = detail::add(detail::scalar_mul_jac(u1, generator()),
                                detail::scalar_mul_jac(u2, q));
  return detail::to_affine(sum);
}

}  // namespace destine::crypto::p256
