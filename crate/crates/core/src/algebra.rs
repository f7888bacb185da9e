//! Parameter records for the algebra family, classification onto the five
//! model algebras, and affine maps between members.
//!
//! Every algebra in the family is determined by its parameter tuple
//! `(q, alpha, beta, gamma)` with `q != 0`, read off the single relation
//! `y*x = q*x*y + alpha*x + beta*y + gamma`.  Up to isomorphism only five
//! members occur ([`ModelClass`]); [`classify`] decides the class by two
//! exact tests (`q = 1`, and vanishing of the translation invariant
//! `gamma*(1-q) + alpha*beta`), and [`iso_from_model`] produces an explicit
//! affine generator map from the model, which [`verify_isomorphism`] checks
//! by exact arithmetic rather than by trusting the construction.
//!
//! [`TableRow`] enumerates the sixteen zero-patterns of `(alpha, beta,
//! gamma)` for `q = 1` and `q != 1`; [`table_row_map`] reproduces the
//! classical per-row generator maps verbatim, including one row whose
//! printed map does not verify - kept deliberately, as a regression case
//! showing why verification must be independent of construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::coeffs::{BigRat, CoeffError, FieldElem, FieldMode, Param};
use crate::ncpoly::{NcError, NcPoly};

/// Shared handle to an immutable parameter record.
pub type AlgebraRef = Arc<AlgebraParams>;

/// Errors from parameter validation and map construction.
#[derive(Clone, PartialEq, Debug, Error)]
pub enum AlgebraError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("linear part of the generator map is singular")]
    SingularLinearPart,
    #[error("generator images must have total degree at most 1")]
    NonAffineImage,
    #[error("generator images do not live in the stated target algebra")]
    WrongTargetAlgebra,
    #[error("algebra parameters do not match the requested table row")]
    RowMismatch,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// The parameter tuple `(q, alpha, beta, gamma)` of one member of the
/// family, together with its coefficient field.  Immutable once built.
#[derive(Clone, PartialEq, Debug)]
pub struct AlgebraParams {
    q: FieldElem,
    alpha: FieldElem,
    beta: FieldElem,
    gamma: FieldElem,
    mode: FieldMode,
}

impl AlgebraParams {
    /// Builds a parameter record; all four values must share one field mode
    /// and `q` must be nonzero.
    pub fn new(
        q: FieldElem,
        alpha: FieldElem,
        beta: FieldElem,
        gamma: FieldElem,
    ) -> Result<AlgebraParams, AlgebraError> {
        let mode = q.mode();
        for v in [&alpha, &beta, &gamma] {
            if v.mode() != mode {
                return Err(AlgebraError::Coeff(CoeffError::MixedFieldModes));
            }
        }
        if q.is_zero() {
            return Err(AlgebraError::InvalidParameter("q must be nonzero".into()));
        }
        Ok(AlgebraParams { q, alpha, beta, gamma, mode })
    }

    /// The fully generic algebra: all four parameters are independent
    /// symbols over `Q`.
    pub fn generic() -> AlgebraParams {
        AlgebraParams {
            q: FieldElem::symbol(Param::Q),
            alpha: FieldElem::symbol(Param::Alpha),
            beta: FieldElem::symbol(Param::Beta),
            gamma: FieldElem::symbol(Param::Gamma),
            mode: FieldMode::Symbolic,
        }
    }

    /// The commutative plane `(1, 0, 0, 0)` over the given field.
    pub fn commutative(mode: FieldMode) -> AlgebraParams {
        AlgebraParams {
            q: mode.one(),
            alpha: mode.zero(),
            beta: mode.zero(),
            gamma: mode.zero(),
            mode,
        }
    }

    /// The first Weyl algebra `(1, 0, 0, 1)`: `y*x = x*y + 1`.
    pub fn weyl(mode: FieldMode) -> AlgebraParams {
        AlgebraParams {
            q: mode.one(),
            alpha: mode.zero(),
            beta: mode.zero(),
            gamma: mode.one(),
            mode,
        }
    }

    /// The shift algebra `(1, 0, 1, 0)`: `y*x = x*y + y`.
    pub fn shift(mode: FieldMode) -> AlgebraParams {
        AlgebraParams {
            q: mode.one(),
            alpha: mode.zero(),
            beta: mode.one(),
            gamma: mode.zero(),
            mode,
        }
    }

    /// The quantum plane `(q, 0, 0, 0)`: `y*x = q*x*y`.
    pub fn quantum_plane(q: FieldElem) -> Result<AlgebraParams, AlgebraError> {
        let mode = q.mode();
        AlgebraParams::new(q, mode.zero(), mode.zero(), mode.zero())
    }

    /// The quantum Weyl algebra `(q, 0, 0, 1)`: `y*x = q*x*y + 1`.
    pub fn q_weyl(q: FieldElem) -> Result<AlgebraParams, AlgebraError> {
        let mode = q.mode();
        AlgebraParams::new(q, mode.zero(), mode.zero(), mode.one())
    }

    pub fn q(&self) -> &FieldElem {
        &self.q
    }

    pub fn alpha(&self) -> &FieldElem {
        &self.alpha
    }

    pub fn beta(&self) -> &FieldElem {
        &self.beta
    }

    pub fn gamma(&self) -> &FieldElem {
        &self.gamma
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }

    pub fn is_q_one(&self) -> bool {
        self.q.is_one()
    }

    /// The translation invariant `gamma*(1-q) + alpha*beta`.
    ///
    /// Division-free, and exactly invariant under generator translations
    /// `x -> x + B, y -> y + A`, which reparametrize `(alpha, beta, gamma)`
    /// as `(alpha + (1-q)A, beta + (1-q)B, gamma - alpha*B - beta*A -
    /// (1-q)AB)` but leave this combination fixed - which is what makes it
    /// the right branch test for `q != 1`.
    pub fn gamma_prime(&self) -> FieldElem {
        let one = self.mode.one();
        &(&self.gamma * &(&one - &self.q)) + &(&self.alpha * &self.beta)
    }

    /// True when all four parameters equal the corresponding symbolic
    /// indeterminates.
    pub fn is_generic(&self) -> bool {
        self.mode == FieldMode::Symbolic
            && self.q == FieldElem::symbol(Param::Q)
            && self.alpha == FieldElem::symbol(Param::Alpha)
            && self.beta == FieldElem::symbol(Param::Beta)
            && self.gamma == FieldElem::symbol(Param::Gamma)
    }
}

impl std::fmt::Display for AlgebraParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "A(q={}, alpha={}, beta={}, gamma={}) over {}",
            self.q, self.alpha, self.beta, self.gamma, self.mode
        )
    }
}

/// The five model algebras that exhaust the family up to isomorphism.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum ModelClass {
    /// `K[x, y]` - the commutative plane `(1, 0, 0, 0)`.
    Commutative,
    /// The first Weyl algebra `(1, 0, 0, 1)`.
    Weyl,
    /// The shift algebra `(1, 0, 1, 0)`.
    Shift,
    /// The quantum plane `(q, 0, 0, 0)`.
    QuantumPlane,
    /// The quantum Weyl algebra `(q, 0, 0, 1)`.
    QWeyl,
}

impl ModelClass {
    pub const ALL: [ModelClass; 5] = [
        ModelClass::Commutative,
        ModelClass::Weyl,
        ModelClass::Shift,
        ModelClass::QuantumPlane,
        ModelClass::QWeyl,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelClass::Commutative => "commutative",
            ModelClass::Weyl => "weyl",
            ModelClass::Shift => "shift",
            ModelClass::QuantumPlane => "quantum-plane",
            ModelClass::QWeyl => "q-weyl",
        }
    }

    /// Model parameters for this class.  The quantum classes need the value
    /// of `q`; the classical classes ignore it.
    pub fn params(&self, mode: FieldMode, q: &FieldElem) -> Result<AlgebraParams, AlgebraError> {
        match self {
            ModelClass::Commutative => Ok(AlgebraParams::commutative(mode)),
            ModelClass::Weyl => Ok(AlgebraParams::weyl(mode)),
            ModelClass::Shift => Ok(AlgebraParams::shift(mode)),
            ModelClass::QuantumPlane => AlgebraParams::quantum_plane(q.clone()),
            ModelClass::QWeyl => AlgebraParams::q_weyl(q.clone()),
        }
    }
}

impl std::fmt::Display for ModelClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelClass {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "commutative" | "plane" => Ok(ModelClass::Commutative),
            "weyl" => Ok(ModelClass::Weyl),
            "shift" => Ok(ModelClass::Shift),
            "quantum-plane" | "qplane" => Ok(ModelClass::QuantumPlane),
            "q-weyl" | "qweyl" => Ok(ModelClass::QWeyl),
            other => Err(AlgebraError::InvalidParameter(format!(
                "unknown model algebra '{}'",
                other
            ))),
        }
    }
}

/// Decides which model algebra `p` is isomorphic to.
///
/// For `q = 1` the class depends on which of `alpha, beta, gamma` vanish;
/// for `q != 1` it depends only on whether the translation invariant
/// `gamma*(1-q) + alpha*beta` vanishes.
pub fn classify(p: &AlgebraParams) -> ModelClass {
    if p.is_q_one() {
        if !p.alpha().is_zero() || !p.beta().is_zero() {
            ModelClass::Shift
        } else if !p.gamma().is_zero() {
            ModelClass::Weyl
        } else {
            ModelClass::Commutative
        }
    } else if p.gamma_prime().is_zero() {
        ModelClass::QuantumPlane
    } else {
        ModelClass::QWeyl
    }
}

/// The sixteen zero-patterns of `(alpha, beta, gamma)` for `q = 1` (rows
/// starting `L`) and `q != 1` (rows starting `Q`).  The trailing letters
/// name the parameters that are nonzero in the row.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum TableRow {
    L000,
    LA00,
    L0B0,
    LAB0,
    L00G,
    LA0G,
    L0BG,
    LABG,
    Q000,
    QA00,
    Q0B0,
    QAB0,
    Q00G,
    QA0G,
    Q0BG,
    QABG,
}

use TableRow::*;

impl TableRow {
    pub const ALL: [TableRow; 16] = [
        L000, LA00, L0B0, LAB0, L00G, LA0G, L0BG, LABG, Q000, QA00, Q0B0, QAB0, Q00G, QA0G, Q0BG,
        QABG,
    ];

    /// The row an algebra's parameters fall into.
    pub fn of(p: &AlgebraParams) -> TableRow {
        let idx = (!p.is_q_one() as usize) << 3
            | (!p.gamma().is_zero() as usize) << 2
            | (!p.beta().is_zero() as usize) << 1
            | (!p.alpha().is_zero() as usize);
        [
            L000, LA00, L0B0, LAB0, L00G, LA0G, L0BG, LABG, Q000, QA00, Q0B0, QAB0, Q00G, QA0G,
            Q0BG, QABG,
        ][idx]
    }

    pub fn q_is_one(&self) -> bool {
        matches!(self, L000 | LA00 | L0B0 | LAB0 | L00G | LA0G | L0BG | LABG)
    }

    pub fn has_alpha(&self) -> bool {
        matches!(self, LA00 | LAB0 | LA0G | LABG | QA00 | QAB0 | QA0G | QABG)
    }

    pub fn has_beta(&self) -> bool {
        matches!(self, L0B0 | LAB0 | L0BG | LABG | Q0B0 | QAB0 | Q0BG | QABG)
    }

    pub fn has_gamma(&self) -> bool {
        matches!(self, L00G | LA0G | L0BG | LABG | Q00G | QA0G | Q0BG | QABG)
    }

    /// The row's algebra with every nonzero parameter kept as a symbol:
    /// e.g. the `LA0G` row gives `(1, alpha, 0, gamma)` over
    /// `Q(q, alpha, beta, gamma)`.
    pub fn symbolic_algebra(&self) -> AlgebraRef {
        let mode = FieldMode::Symbolic;
        let q = if self.q_is_one() {
            mode.one()
        } else {
            FieldElem::symbol(Param::Q)
        };
        let alpha = if self.has_alpha() {
            FieldElem::symbol(Param::Alpha)
        } else {
            mode.zero()
        };
        let beta = if self.has_beta() {
            FieldElem::symbol(Param::Beta)
        } else {
            mode.zero()
        };
        let gamma = if self.has_gamma() {
            FieldElem::symbol(Param::Gamma)
        } else {
            mode.zero()
        };
        Arc::new(AlgebraParams::new(q, alpha, beta, gamma).expect("valid row parameters"))
    }

    /// Whether a closed commutation formula for `y^m x^n` is implemented for
    /// this row.  The four rows with both `alpha` and `beta` nonzero have no
    /// known closed form and are served by pullback instead.
    pub fn has_closed_formula(&self) -> bool {
        !matches!(self, LAB0 | LABG | QAB0 | QABG)
    }

    /// Whether a coefficient recurrence is implemented for this row.
    pub fn has_recurrence(&self) -> bool {
        matches!(self, LA00 | L0B0 | L00G)
    }

    /// The model class printed in the classical per-row table.
    ///
    /// For every row but one this matches [`classify`].  The exception is
    /// [`TableRow::QAB0`], whose printed class (quantum plane) is wrong when
    /// both `alpha` and `beta` are nonzero - see [`table_row_map`].
    pub fn listed_class(&self) -> ModelClass {
        match self {
            L000 => ModelClass::Commutative,
            L00G => ModelClass::Weyl,
            LA00 | L0B0 | LAB0 | LA0G | L0BG | LABG => ModelClass::Shift,
            Q000 | QA00 | Q0B0 | QAB0 => ModelClass::QuantumPlane,
            Q00G | QA0G | Q0BG | QABG => ModelClass::QWeyl,
        }
    }

    /// Row label such as `(1,alpha,0,gamma)` or `(q,0,beta,0)`.
    pub fn label(&self) -> String {
        format!(
            "({},{},{},{})",
            if self.q_is_one() { "1" } else { "q" },
            if self.has_alpha() { "alpha" } else { "0" },
            if self.has_beta() { "beta" } else { "0" },
            if self.has_gamma() { "gamma" } else { "0" },
        )
    }
}

impl std::fmt::Display for TableRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// An affine generator map between two members of the family: each
/// generator of the source is sent to a polynomial of total degree at most 1
/// in the target.
#[derive(Clone, PartialEq, Debug)]
pub struct AffineMap {
    source: AlgebraRef,
    target: AlgebraRef,
    image_x: NcPoly,
    image_y: NcPoly,
}

impl AffineMap {
    /// Builds a map after checking that both images live in `target` and
    /// have total degree at most 1.  Invertibility is *not* assumed here;
    /// [`verify_isomorphism`] and [`invert_affine`] test it where it
    /// matters.
    pub fn new(
        source: AlgebraRef,
        target: AlgebraRef,
        image_x: NcPoly,
        image_y: NcPoly,
    ) -> Result<AffineMap, AlgebraError> {
        for img in [&image_x, &image_y] {
            if img.algebra().as_ref() != target.as_ref() {
                return Err(AlgebraError::WrongTargetAlgebra);
            }
            if img.total_degree() > 1 {
                return Err(AlgebraError::NonAffineImage);
            }
        }
        Ok(AffineMap { source, target, image_x, image_y })
    }

    pub fn source(&self) -> &AlgebraRef {
        &self.source
    }

    pub fn target(&self) -> &AlgebraRef {
        &self.target
    }

    pub fn image_x(&self) -> &NcPoly {
        &self.image_x
    }

    pub fn image_y(&self) -> &NcPoly {
        &self.image_y
    }

    /// The linear part as `[[a_x, b_x], [a_y, b_y]]` where
    /// `image_x = a_x*x + b_x*y + c_x` and similarly for `image_y`.
    pub fn linear_part(&self) -> [[FieldElem; 2]; 2] {
        [
            [self.image_x.coeff(1, 0), self.image_x.coeff(0, 1)],
            [self.image_y.coeff(1, 0), self.image_y.coeff(0, 1)],
        ]
    }

    /// Determinant of the linear part.
    pub fn det(&self) -> FieldElem {
        let [[ax, bx], [ay, by]] = self.linear_part();
        &(&ax * &by) - &(&bx * &ay)
    }

    /// Constant parts `(c_x, c_y)` of the two images.
    pub fn translation(&self) -> (FieldElem, FieldElem) {
        (self.image_x.coeff(0, 0), self.image_y.coeff(0, 0))
    }
}

impl std::fmt::Display for AffineMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x -> {}, y -> {}", self.image_x, self.image_y)
    }
}

/// Builds the affine polynomial `cx*x + cy*y + c0` in `alg`.
fn affine_poly(
    alg: &AlgebraRef,
    cx: FieldElem,
    cy: FieldElem,
    c0: FieldElem,
) -> Result<NcPoly, NcError> {
    let mut p = NcPoly::zero(alg);
    p = p.add(&NcPoly::monomial(alg, 1, 0, cx)?)?;
    p = p.add(&NcPoly::monomial(alg, 0, 1, cy)?)?;
    p = p.add(&NcPoly::constant(alg, c0)?)?;
    Ok(p)
}

/// An affine map from `classify(p)`'s model algebra onto `A(p)`.
///
/// The construction follows the two-branch decision procedure: for `q = 1`
/// an `alpha`-row map if `alpha != 0`, else a `beta`-row map, else a Weyl or
/// identity map; for `q != 1` a generator translation when the invariant
/// `gamma*(1-q) + alpha*beta` vanishes, and a translation plus rescaling
/// onto the quantum Weyl algebra otherwise.
pub fn iso_from_model(p: &AlgebraRef) -> AffineMap {
    let mode = p.mode();
    let one = mode.one();
    let zero = mode.zero();
    let class = classify(p);
    let source = Arc::new(
        class
            .params(mode, p.q())
            .expect("model parameters are valid"),
    );
    let (ix, iy) = if p.is_q_one() {
        if !p.alpha().is_zero() {
            // X -> -y/alpha, Y -> alpha*x + beta*y + gamma.
            let inv_a = p.alpha().try_inv().expect("alpha is nonzero");
            (
                (zero.clone(), inv_a.neg(), zero.clone()),
                (p.alpha().clone(), p.beta().clone(), p.gamma().clone()),
            )
        } else if !p.beta().is_zero() {
            // X -> x/beta, Y -> beta*y + gamma.
            let inv_b = p.beta().try_inv().expect("beta is nonzero");
            (
                (inv_b, zero.clone(), zero.clone()),
                (zero.clone(), p.beta().clone(), p.gamma().clone()),
            )
        } else if !p.gamma().is_zero() {
            // Weyl: X -> x, Y -> y/gamma.
            let inv_g = p.gamma().try_inv().expect("gamma is nonzero");
            (
                (one.clone(), zero.clone(), zero.clone()),
                (zero.clone(), inv_g, zero.clone()),
            )
        } else {
            // Commutative: identity.
            (
                (one.clone(), zero.clone(), zero.clone()),
                (zero.clone(), one.clone(), zero.clone()),
            )
        }
    } else {
        let one_minus_q = &one - p.q();
        let a_shift = p
            .alpha()
            .try_div(&one_minus_q)
            .expect("q != 1")
            .neg(); // -alpha/(1-q)
        let b_shift = p
            .beta()
            .try_div(&one_minus_q)
            .expect("q != 1")
            .neg(); // -beta/(1-q)
        let gp = p.gamma_prime();
        if gp.is_zero() {
            // Quantum plane: pure translation X -> x - beta/(1-q),
            // Y -> y - alpha/(1-q).
            (
                (one.clone(), zero.clone(), b_shift),
                (zero.clone(), one.clone(), a_shift),
            )
        } else {
            // Quantum Weyl: X -> x - beta/(1-q),
            // Y -> ((1-q)*y - alpha) / (gamma*(1-q) + alpha*beta).
            let inv_gp = gp.try_inv().expect("invariant is nonzero");
            (
                (one.clone(), zero.clone(), b_shift),
                (
                    zero.clone(),
                    one_minus_q.try_mul(&inv_gp).expect("same mode"),
                    p.alpha().try_mul(&inv_gp).expect("same mode").neg(),
                ),
            )
        }
    };
    let image_x = affine_poly(p, ix.0, ix.1, ix.2).expect("affine image");
    let image_y = affine_poly(p, iy.0, iy.1, iy.2).expect("affine image");
    AffineMap::new(source, Arc::clone(p), image_x, image_y).expect("valid map")
}

/// The classical per-row generator map, built verbatim from the printed
/// table.  `target`'s parameters must fall into `row`.
///
/// All rows produce verified isomorphisms except [`TableRow::QAB0`], whose
/// printed pure-translation map into the quantum plane leaves the constant
/// relation defect `alpha*beta/(1-q)`; [`verify_isomorphism`] reports it.
/// [`TableRow::QABG`] divides by `gamma*(1-q) + alpha*beta` and therefore
/// errors when that invariant vanishes for the concrete parameters.
pub fn table_row_map(row: TableRow, target: &AlgebraRef) -> Result<AffineMap, AlgebraError> {
    if TableRow::of(target) != row {
        return Err(AlgebraError::RowMismatch);
    }
    let mode = target.mode();
    let one = mode.one();
    let zero = mode.zero();
    let source = Arc::new(row.listed_class().params(mode, target.q())?);
    // Shorthands; only valid (and only used) where the row guarantees the
    // divisor is nonzero.
    let inv = |v: &FieldElem| -> Result<FieldElem, AlgebraError> { Ok(v.try_inv()?) };
    let shift = |v: &FieldElem| -> Result<FieldElem, AlgebraError> {
        // v/(1-q), used only in Q rows.
        Ok(v.try_div(&(&one - target.q()))?)
    };
    let (ix, iy) = match row {
        L000 | Q000 => (
            (one.clone(), zero.clone(), zero.clone()),
            (zero.clone(), one.clone(), zero.clone()),
        ),
        LA00 => (
            (zero.clone(), inv(target.alpha())?.neg(), zero.clone()),
            (one.clone(), zero.clone(), zero.clone()),
        ),
        L0B0 => (
            (inv(target.beta())?, zero.clone(), zero.clone()),
            (zero.clone(), one.clone(), zero.clone()),
        ),
        LAB0 => (
            (zero.clone(), inv(target.alpha())?.neg(), zero.clone()),
            (target.alpha().clone(), target.beta().clone(), zero.clone()),
        ),
        L00G => (
            (one.clone(), zero.clone(), zero.clone()),
            (zero.clone(), inv(target.gamma())?, zero.clone()),
        ),
        LA0G => (
            (zero.clone(), inv(target.alpha())?.neg(), zero.clone()),
            (target.alpha().clone(), zero.clone(), target.gamma().clone()),
        ),
        L0BG => (
            (inv(target.beta())?, zero.clone(), zero.clone()),
            (zero.clone(), target.beta().clone(), target.gamma().clone()),
        ),
        LABG => (
            (zero.clone(), inv(target.alpha())?.neg(), zero.clone()),
            (
                target.alpha().clone(),
                target.beta().clone(),
                target.gamma().clone(),
            ),
        ),
        QA00 => (
            (one.clone(), zero.clone(), zero.clone()),
            (zero.clone(), one.clone(), shift(target.alpha())?.neg()),
        ),
        Q0B0 => (
            (one.clone(), zero.clone(), shift(target.beta())?.neg()),
            (zero.clone(), one.clone(), zero.clone()),
        ),
        QAB0 => (
            // Printed as a plain translation onto the quantum plane; does
            // not verify when alpha*beta != 0.
            (one.clone(), zero.clone(), shift(target.beta())?.neg()),
            (zero.clone(), one.clone(), shift(target.alpha())?.neg()),
        ),
        Q00G => (
            (one.clone(), zero.clone(), zero.clone()),
            (zero.clone(), inv(target.gamma())?, zero.clone()),
        ),
        QA0G => (
            (inv(target.gamma())?, zero.clone(), zero.clone()),
            (zero.clone(), one.clone(), shift(target.alpha())?.neg()),
        ),
        Q0BG => (
            (one.clone(), zero.clone(), shift(target.beta())?.neg()),
            (zero.clone(), inv(target.gamma())?, zero.clone()),
        ),
        QABG => {
            let gp = target.gamma_prime();
            if gp.is_zero() {
                return Err(AlgebraError::Coeff(CoeffError::DivisionByZero));
            }
            let inv_gp = gp.try_inv()?;
            let one_minus_q = &one - target.q();
            (
                (one.clone(), zero.clone(), shift(target.beta())?.neg()),
                (
                    zero.clone(),
                    one_minus_q.try_mul(&inv_gp)?,
                    target.alpha().try_mul(&inv_gp)?.neg(),
                ),
            )
        }
    };
    let image_x = affine_poly(target, ix.0, ix.1, ix.2).map_err(|_| AlgebraError::NonAffineImage)?;
    let image_y = affine_poly(target, iy.0, iy.1, iy.2).map_err(|_| AlgebraError::NonAffineImage)?;
    AffineMap::new(source, Arc::clone(target), image_x, image_y)
}

/// The defect of the source relation under the map: with source parameters
/// `(q, alpha, beta, gamma)` and images `X, Y`, computes
/// `q*X*Y + alpha*X + beta*Y + gamma - Y*X` in the target algebra by the
/// rewriting engine.  The zero polynomial iff the map respects the relation.
pub fn relation_residual(map: &AffineMap) -> NcPoly {
    let s = map.source();
    let fx = map.image_x();
    let fy = map.image_y();
    let yx = fy.mul(fx).expect("images share the target algebra");
    let xy = fx.mul(fy).expect("images share the target algebra");
    xy.scalar_mul(s.q())
        .and_then(|r| r.add(&fx.scalar_mul(s.alpha()).expect("same mode")))
        .and_then(|r| r.add(&fy.scalar_mul(s.beta()).expect("same mode")))
        .and_then(|r| {
            r.add(&NcPoly::constant(map.target(), s.gamma().clone()).expect("constant"))
        })
        .and_then(|r| r.sub(&yx))
        .expect("all operands share the target algebra")
}

/// True iff the map is a verified isomorphism: the linear part is
/// invertible and the source relation maps to zero, both checked exactly.
pub fn verify_isomorphism(map: &AffineMap) -> bool {
    !map.det().is_zero() && relation_residual(map).is_zero()
}

/// Applies the map to an element of the source algebra, substituting the
/// generator images and renormalizing in the target.
pub fn apply_map(map: &AffineMap, f: &NcPoly) -> Result<NcPoly, NcError> {
    if f.algebra().as_ref() != map.source().as_ref() {
        return Err(NcError::AlgebraMismatch);
    }
    let target = map.target();
    // f = sum_b (sum_a c_ab x^a) y^b; evaluate both layers by sparse Horner
    // so every product is polynomial-times-affine-image.  This keeps the
    // coefficient arithmetic incremental, which matters a great deal for
    // rational-function coefficients.
    let mut rows: BTreeMap<u32, BTreeMap<u32, FieldElem>> = BTreeMap::new();
    for (m, c) in f.terms() {
        rows.entry(m.b()).or_default().insert(m.a(), c.clone());
    }
    let mut slices: Vec<(u32, NcPoly)> = Vec::with_capacity(rows.len());
    for (b, row) in &rows {
        let mut s = NcPoly::zero(target);
        let mut reached: Option<u32> = None;
        for (a, c) in row.iter().rev() {
            if let Some(prev) = reached {
                for _ in 0..prev - a {
                    s = s.mul(map.image_x())?;
                }
            }
            s = s.add(&NcPoly::constant(target, c.clone())?)?;
            reached = Some(*a);
        }
        for _ in 0..reached.unwrap_or(0) {
            s = s.mul(map.image_x())?;
        }
        slices.push((*b, s));
    }
    let mut acc = NcPoly::zero(target);
    let mut reached: Option<u32> = None;
    for (b, s) in slices.iter().rev() {
        if let Some(prev) = reached {
            for _ in 0..prev - b {
                acc = acc.mul(map.image_y())?;
            }
        }
        acc = acc.add(s)?;
        reached = Some(*b);
    }
    for _ in 0..reached.unwrap_or(0) {
        acc = acc.mul(map.image_y())?;
    }
    Ok(acc)
}

/// Inverts an affine map with invertible linear part, swapping source and
/// target.
pub fn invert_affine(map: &AffineMap) -> Result<AffineMap, AlgebraError> {
    let det = map.det();
    if det.is_zero() {
        return Err(AlgebraError::SingularLinearPart);
    }
    let [[ax, bx], [ay, by]] = map.linear_part();
    let (cx, cy) = map.translation();
    let inv_det = det.try_inv()?;
    // Solve the affine system for the source generators.
    let m = |v: &FieldElem| v.try_mul(&inv_det).expect("same mode");
    let nix = (
        m(&by),
        m(&bx.neg()),
        m(&(&(&bx * &cy) - &(&by * &cx))),
    );
    let niy = (
        m(&ay.neg()),
        m(&ax),
        m(&(&(&ay * &cx) - &(&ax * &cy))),
    );
    let image_x = affine_poly(map.source(), nix.0, nix.1, nix.2)
        .map_err(|_| AlgebraError::NonAffineImage)?;
    let image_y = affine_poly(map.source(), niy.0, niy.1, niy.2)
        .map_err(|_| AlgebraError::NonAffineImage)?;
    AffineMap::new(
        Arc::clone(map.target()),
        Arc::clone(map.source()),
        image_x,
        image_y,
    )
}

/// The shift operator algebra of step `c != 0` acting on `K[x]`:
/// `(s_c f)(x) = f(x - c)` satisfies `s_c * x = x*s_c - c*s_c`, giving the
/// parameters `(1, 0, -c, 0)`.
pub fn c_shift(c: &BigRat) -> Result<AlgebraParams, AlgebraError> {
    use num::Zero;
    if c.is_zero() {
        return Err(AlgebraError::InvalidParameter("shift step c must be nonzero".into()));
    }
    let mode = FieldMode::Rational;
    AlgebraParams::new(
        mode.one(),
        mode.zero(),
        FieldElem::Rat(-c.clone()),
        mode.zero(),
    )
}

/// The difference operator algebra with steps `c1, c2 != 0`:
/// parameters `(1, 0, c1, c1/c2)`.
pub fn c_difference(c1: &BigRat, c2: &BigRat) -> Result<AlgebraParams, AlgebraError> {
    use num::Zero;
    if c1.is_zero() || c2.is_zero() {
        return Err(AlgebraError::InvalidParameter(
            "difference steps c1, c2 must be nonzero".into(),
        ));
    }
    let mode = FieldMode::Rational;
    AlgebraParams::new(
        mode.one(),
        mode.zero(),
        FieldElem::Rat(c1.clone()),
        FieldElem::Rat(c1 / c2),
    )
}

/// The q-difference (Jackson) operator algebra over `Q(q)`:
/// parameters `(q, q - 1, 0, 0)`.
pub fn q_difference() -> AlgebraParams {
    let q = FieldElem::symbol(Param::Q);
    let one = FieldMode::Symbolic.one();
    AlgebraParams::new(
        q.clone(),
        &q - &one,
        FieldMode::Symbolic.zero(),
        FieldMode::Symbolic.zero(),
    )
    .expect("q is a nonzero symbol")
}

/// The q-differential operator algebra with integer exponents
/// `c1, c2 >= 1`: parameters `(q^c1, 0, 0, (q^c1 - 1)/(q^c2 - 1))`.
pub fn cq_differential(c1: u32, c2: u32) -> Result<AlgebraParams, AlgebraError> {
    if c1 == 0 || c2 == 0 {
        return Err(AlgebraError::InvalidParameter(
            "exponents c1, c2 must be at least 1".into(),
        ));
    }
    let q = FieldElem::symbol(Param::Q);
    let one = FieldMode::Symbolic.one();
    let gamma = (&q.pow(c1) - &one).try_div(&(&q.pow(c2) - &one))?;
    Ok(AlgebraParams::new(
        q.pow(c1),
        FieldMode::Symbolic.zero(),
        FieldMode::Symbolic.zero(),
        gamma,
    )
    .expect("q^c1 is a nonzero symbol"))
}

/// The polynomial condition a one-dimensional representation `x -> a,
/// y -> b` must satisfy: substituting scalars into the relation leaves
/// `(1-q)*a*b - alpha*a - beta*b - gamma = 0`.
#[derive(Clone, PartialEq, Debug)]
pub struct RepResidual {
    /// Coefficient of `a*b`, namely `1 - q`.
    pub coeff_ab: FieldElem,
    /// Coefficient of `a`, namely `-alpha`.
    pub coeff_a: FieldElem,
    /// Coefficient of `b`, namely `-beta`.
    pub coeff_b: FieldElem,
    /// Constant term, namely `-gamma`.
    pub coeff_const: FieldElem,
}

impl RepResidual {
    /// Evaluates the residual at scalars `(a, b)`.
    pub fn eval(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem, CoeffError> {
        let mut acc = self.coeff_ab.try_mul(a)?.try_mul(b)?;
        acc = acc.try_add(&self.coeff_a.try_mul(a)?)?;
        acc = acc.try_add(&self.coeff_b.try_mul(b)?)?;
        acc.try_add(&self.coeff_const)
    }

    /// True iff `(a, b)` defines a one-dimensional representation.
    pub fn is_representation(&self, a: &FieldElem, b: &FieldElem) -> Result<bool, CoeffError> {
        Ok(self.eval(a, b)?.is_zero())
    }

    /// True when the residual is a nonzero constant, i.e. no
    /// one-dimensional representation exists at all.
    pub fn is_empty_variety(&self) -> bool {
        self.coeff_ab.is_zero()
            && self.coeff_a.is_zero()
            && self.coeff_b.is_zero()
            && !self.coeff_const.is_zero()
    }
}

impl std::fmt::Display for RepResidual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for (c, name) in [
            (&self.coeff_ab, "a*b"),
            (&self.coeff_a, "a"),
            (&self.coeff_b, "b"),
        ] {
            if !c.is_zero() {
                if wrote {
                    write!(f, " + ")?;
                }
                let (neg, body, parens) = c.display_parts();
                if neg {
                    write!(f, "-")?;
                }
                if body == "1" {
                    write!(f, "{}", name)?;
                } else if parens {
                    write!(f, "({})*{}", body, name)?;
                } else {
                    write!(f, "{}*{}", body, name)?;
                }
                wrote = true;
            }
        }
        if !self.coeff_const.is_zero() || !wrote {
            if wrote {
                write!(f, " + ")?;
            }
            write!(f, "{}", self.coeff_const)?;
        }
        Ok(())
    }
}

/// The residual polynomial whose zero set is the variety of
/// one-dimensional representations of `A(p)`.
pub fn one_dim_reps(p: &AlgebraParams) -> RepResidual {
    let one = p.mode().one();
    RepResidual {
        coeff_ab: &one - p.q(),
        coeff_a: p.alpha().neg(),
        coeff_b: p.beta().neg(),
        coeff_const: p.gamma().neg(),
    }
}
