//! The zero-curvature system inside two larger gauge systems.
//!
//! **Bogomolny (YMHB) equations.** With a Higgs field Φ:
//!
//! ```text
//! Y₁ = Φ_t + [Φ, C] + A_y − B_x + [A, B]
//! Y₂ = Φ_y + [Φ, B] + A_t − C_x + [A, C]
//! Y₃ = Φ_x + [Φ, A] + B_t − C_y + [B, C]
//! ```
//!
//! Φ = 0 gives back `(R_a, R_b, R_c)`. The pencils
//! `P₁ = (−∂_t − ∂_y + λ∂_x) − (C + B − λA − λΦ)` and
//! `P₂ = (λ∂_t − λ∂_y − ∂_x) − (−λC + λB + A − Φ)` have λ-coefficients
//! `(Y₁′ + Y₂′, 2Y₃′, Y₁′ − Y₂′)` where every bracket is flipped and the Higgs
//! Φ enters the first two equations with a minus sign but the third with a plus:
//!
//! ```text
//! Y₁′ = −Φ_t + [Φ, C] + R_a⁻     Y₂′ = −Φ_y + [Φ, B] + R_b⁻     Y₃′ = Φ_x − [Φ, A] + R_c⁻
//! ```
//!
//! **Self-dual Yang–Mills.** For z-independent fields the potentials
//! `A_α = −iC`, `A_ᾱ = iC`, `A_β = A − iB`, `A_β̄ = A + iB` and derivatives
//! `∂_α = −i∂_t`, `∂_ᾱ = i∂_t`, `∂_β = ∂_x − i∂_y`, `∂_β̄ = ∂_x + i∂_y` give,
//! with `F_μν = ∂_μA_ν − ∂_νA_μ − [A_μ, A_ν]`,
//!
//! ```text
//! F_αβ = −R_c − iR_b      F_ᾱβ̄ = −R_c + iR_b      F_αᾱ + F_ββ̄ = −2iR_a
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{ComplexMatrix, MatrixValue, Sign};
use crate::curvature::{curvature_term, residual_2p1, HiggsTerm, ResidualReport};
use crate::error::{domain, Error, Result};
use crate::fields::{Axis, Component, Connection, Field};
use crate::lax::{OperatorPencil, PencilSign};

/// Higgs field Φ, valued in the same algebra as the connection.
pub type HiggsField<E> = Component<E>;

/// `(Y₁, Y₂, Y₃)`. Φ ≡ 0 takes the zero-curvature code path unchanged.
pub fn ymhb_residual<E: MatrixValue>(conn: &Connection<E>, phi: &HiggsField<E>) -> Result<[Field<E>; 3]> {
    if phi.value.is_identically_zero() {
        conn.grid().ensure_same(phi.grid())?;
        return residual_2p1(conn);
    }
    ymhb_residual_signed(conn, phi, Sign::Plus, [1.0; 3])
}

/// YMHB residuals with every bracket multiplied by `sign` and the Higgs part
/// of equation k multiplied by `higgs[k]`.
pub fn ymhb_residual_signed<E: MatrixValue>(
    conn: &Connection<E>,
    phi: &HiggsField<E>,
    sign: Sign,
    higgs: [f64; 3],
) -> Result<[Field<E>; 3]> {
    conn.grid().require_3d("the Bogomolny residual")?;
    let (a, b, c) = (conn.a(), conn.b()?, conn.c());
    let h = |axis, partner, s| Some(HiggsTerm { phi, axis, partner, sign: s });
    Ok([
        curvature_term(a, Axis::X, b, Axis::Y, sign, h(Axis::T, c, higgs[0]))?,
        curvature_term(a, Axis::X, c, Axis::T, sign, h(Axis::Y, b, higgs[1]))?,
        curvature_term(b, Axis::Y, c, Axis::T, sign, h(Axis::X, a, higgs[2]))?,
    ])
}

/// `∂_i Φ + [A_i, Φ]`.
pub fn covariant_derivative<E: MatrixValue>(phi: &HiggsField<E>, a_i: &Component<E>, axis: Axis) -> Result<Field<E>> {
    let d = phi.derivative(axis)?;
    d.zip_map(&a_i.value.zip_map(&phi.value, |a, p| *a * *p - *p * *a)?, |x, y| *x + *y)
}

/// Pencils of the Bogomolny system; Φ = 0 gives [`crate::lax::gcme_pencils`].
pub fn ymhb_pencils<E: MatrixValue>(
    conn: &Connection<E>,
    phi: &HiggsField<E>,
    sign: PencilSign,
) -> Result<(OperatorPencil<E>, OperatorPencil<E>)> {
    let (mut p1, mut p2) = crate::lax::gcme_pencils(conn, sign)?;
    if !phi.is_identically_zero() {
        let s = sign.value();
        p1.potential[1] = p1.potential[1].add(&phi.scale(-s))?;
        p2.potential[0] = p2.potential[0].add(&phi.scale(-s))?;
    }
    Ok((p1, p2))
}

/// The residuals the Bogomolny pencil coefficients map onto through
/// [`crate::lax::coeffs_to_gcme`]: `(Y₁′, Y₂′, Y₃′)`.
pub fn ymhb_pencil_target<E: MatrixValue>(conn: &Connection<E>, phi: &HiggsField<E>) -> Result<[Field<E>; 3]> {
    ymhb_residual_signed(conn, phi, Sign::Minus, [-1.0, -1.0, 1.0])
}

/// Index of the self-dual coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GreekIndex {
    Alpha,
    AlphaBar,
    Beta,
    BetaBar,
}

impl GreekIndex {
    pub const ALL: [GreekIndex; 4] = [GreekIndex::Alpha, GreekIndex::AlphaBar, GreekIndex::Beta, GreekIndex::BetaBar];

    fn slot(self) -> usize {
        self as usize
    }
}

/// How `∂_α, ∂_ᾱ, ∂_β, ∂_β̄` are written in terms of `∂_x, ∂_y, ∂_t`:
///
/// `∂_α = s_α·i∂_t`, `∂_ᾱ = −s_α·i∂_t`, `∂_β = ∂_x + s_β·i∂_y`, `∂_β̄ = ∂_x − s_β·i∂_y`,
/// with x and y exchanged when `swap_xy` is set. The default is `s_α = s_β = −1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SdymMap {
    pub alpha_sign: Sign,
    pub beta_y_sign: Sign,
    pub swap_xy: bool,
}

impl Default for SdymMap {
    fn default() -> Self {
        SdymMap { alpha_sign: Sign::Minus, beta_y_sign: Sign::Minus, swap_xy: false }
    }
}

impl SdymMap {
    /// All eight maps, default first.
    pub fn all() -> Vec<SdymMap> {
        let mut out = Vec::with_capacity(8);
        for swap_xy in [false, true] {
            for alpha_sign in [Sign::Minus, Sign::Plus] {
                for beta_y_sign in [Sign::Minus, Sign::Plus] {
                    out.push(SdymMap { alpha_sign, beta_y_sign, swap_xy });
                }
            }
        }
        out
    }

    /// Coefficients of `(∂_x, ∂_y, ∂_t)` in `∂_μ`.
    pub fn coefficients(&self, mu: GreekIndex) -> [Complex64; 3] {
        let i = Complex64::new(0.0, 1.0);
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let sa = i * self.alpha_sign.value();
        let sb = i * self.beta_y_sign.value();
        let (first, second) = if self.swap_xy { (1, 0) } else { (0, 1) };
        let mut c = [z; 3];
        match mu {
            GreekIndex::Alpha => c[2] = sa,
            GreekIndex::AlphaBar => c[2] = -sa,
            GreekIndex::Beta => {
                c[first] = one;
                c[second] = sb;
            }
            GreekIndex::BetaBar => {
                c[first] = one;
                c[second] = -sb;
            }
        }
        c
    }
}

/// Four complex potentials and the derivative map that goes with them.
#[derive(Clone, Debug)]
pub struct SdymPotentials<C> {
    pub map: SdymMap,
    potentials: [Component<C>; 4],
}

impl<C: ComplexMatrix> SdymPotentials<C> {
    pub fn get(&self, mu: GreekIndex) -> &Component<C> {
        &self.potentials[mu.slot()]
    }

    /// `Σ_axis c_axis ∂_axis f` for the map's `∂_μ`.
    fn derivative(&self, mu: GreekIndex, f: &Component<C>) -> Result<Field<C>> {
        let coeffs = self.map.coefficients(mu);
        let mut out = Field::zeros(*f.grid());
        for axis in f.grid().axes() {
            let c = coeffs[axis.index()];
            if c != Complex64::new(0.0, 0.0) {
                out = out.add(&f.derivative(axis)?.map(|m| m.scale_c(c)))?;
            }
        }
        Ok(out)
    }
}

/// Potentials `A_μ = Σ c_axis (A, B, C)_axis` read off the map, so that the
/// default map gives `A_α = −iC`, `A_ᾱ = iC`, `A_β = A − iB`, `A_β̄ = A + iB`.
pub fn sdym_potentials<E: MatrixValue>(conn: &Connection<E>, map: SdymMap) -> Result<SdymPotentials<E::Complex>> {
    conn.grid().require_3d("the self-dual reduction")?;
    let build = |mu: GreekIndex| -> Result<Component<E::Complex>> {
        let coeffs = map.coefficients(mu);
        let mut acc: Option<Component<E::Complex>> = None;
        for axis in Axis::ALL {
            let c = coeffs[axis.index()];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let term = conn.component(axis)?.map_linear(move |m: &E| m.to_complex().scale_c(c));
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        Ok(acc.expect("every index has a nonzero coefficient"))
    };
    use GreekIndex::*;
    let potentials = [build(Alpha)?, build(AlphaBar)?, build(Beta)?, build(BetaBar)?];
    Ok(SdymPotentials { map, potentials })
}

/// `F_μν = ∂_μA_ν − ∂_νA_μ − [A_μ, A_ν]`.
pub fn sdym_curvature<C: ComplexMatrix>(p: &SdymPotentials<C>, mu: GreekIndex, nu: GreekIndex) -> Result<Field<C>> {
    if mu == nu {
        return Err(domain(format!("curvature needs distinct indices, got {mu:?} twice")));
    }
    let (am, an) = (p.get(mu), p.get(nu));
    let d1 = p.derivative(mu, an)?;
    let d2 = p.derivative(nu, am)?;
    let br = am.value.zip_map(&an.value, |x, y| *x * *y - *y * *x)?;
    d1.sub(&d2)?.sub(&br)
}

/// Pointwise deviations of the three reduction identities.
#[derive(Clone, Debug)]
pub struct SdymIdentities<C> {
    /// `F_αβ + R_c + iR_b`
    pub f_ab: Field<C>,
    /// `F_ᾱβ̄ + R_c − iR_b`
    pub f_abar_bbar: Field<C>,
    /// `F_αᾱ + F_ββ̄ + 2iR_a`
    pub f_trace: Field<C>,
}

impl<C: ComplexMatrix> SdymIdentities<C> {
    pub const LABELS: [&'static str; 3] = ["F_ab", "F_abar_bbar", "F_trace"];

    /// Max deviations in [`Self::LABELS`] order.
    pub fn max(&self) -> [f64; 3] {
        [self.f_ab.max_norm(), self.f_abar_bbar.max_norm(), self.f_trace.max_norm()]
    }

    pub fn report(&self) -> ResidualReport {
        let mut r = ResidualReport::new(*self.f_ab.grid());
        r.add(Self::LABELS[0], &self.f_ab).add(Self::LABELS[1], &self.f_abar_bbar).add(Self::LABELS[2], &self.f_trace);
        r
    }
}

pub fn sdym_identity_deviations<E: MatrixValue>(conn: &Connection<E>, map: SdymMap) -> Result<SdymIdentities<E::Complex>> {
    use GreekIndex::*;
    let p = sdym_potentials(conn, map)?;
    let i = Complex64::new(0.0, 1.0);
    let [ra, rb, rc] = residual_2p1(conn)?.map(|r| r.map(|m| m.to_complex()));
    let f_ab = sdym_curvature(&p, Alpha, Beta)?;
    let f_abar_bbar = sdym_curvature(&p, AlphaBar, BetaBar)?;
    let f_aa = sdym_curvature(&p, Alpha, AlphaBar)?;
    let f_bb = sdym_curvature(&p, Beta, BetaBar)?;
    let rb_i = rb.map(|m| m.scale_c(i));
    Ok(SdymIdentities {
        f_ab: f_ab.add(&rc)?.add(&rb_i)?,
        f_abar_bbar: f_abar_bbar.add(&rc)?.sub(&rb_i)?,
        f_trace: f_aa.add(&f_bb)?.add(&ra.map(|m| m.scale_c(i * 2.0)))?,
    })
}

/// Checks the three identities under `map`, failing on the first one whose
/// max deviation exceeds `tolerance`.
pub fn sdym_reduction_check<E: MatrixValue>(
    conn: &Connection<E>,
    map: SdymMap,
    tolerance: f64,
) -> Result<SdymIdentities<E::Complex>> {
    let ids = sdym_identity_deviations(conn, map)?;
    for (label, dev) in SdymIdentities::<E::Complex>::LABELS.iter().zip(ids.max()) {
        if !(dev <= tolerance) {
            return Err(Error::IdentityViolation { identity: label, deviation: dev, tolerance });
        }
    }
    Ok(ids)
}
