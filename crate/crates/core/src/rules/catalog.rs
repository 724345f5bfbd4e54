use std::fmt;
use std::str::FromStr;

use super::refine::refine_projector;
use super::UpdateRule;
use crate::error::{GurError, Result};
use crate::linalg::{embed_local, fourier_matrix, place, reduce_to, shift_operator, trace_out, ComplexMatrix};
use crate::state::{Gemenge, Outcome, QuantumState, Target, TRACE_FLOOR};

/// Basis from which the von Neumann rule reads off its refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Computational,
    Fourier,
}

impl Reference {
    fn basis(self, dim: usize) -> ComplexMatrix {
        match self {
            Reference::Computational => ComplexMatrix::identity(dim),
            Reference::Fourier => fourier_matrix(dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogRule {
    Luders,
    LocLuders,
    Passive,
    Dep,
    Lambda(f64),
    CcDep,
    CcLambda(f64),
    Mu(f64),
    VonNeumann {
        reference: Reference,
        /// Rotation of the reference basis on the measured subsystem.
        frame: Option<ComplexMatrix>,
    },
    UnitaryKick,
}

impl CatalogRule {
    pub fn von_neumann(reference: Reference) -> Self {
        CatalogRule::VonNeumann { reference, frame: None }
    }

    pub fn lambda(l: f64) -> Result<Self> {
        check_unit_interval("λ", l)?;
        Ok(CatalogRule::Lambda(l))
    }

    pub fn cc_lambda(l: f64) -> Result<Self> {
        check_unit_interval("λ", l)?;
        Ok(CatalogRule::CcLambda(l))
    }

    pub fn mu(m: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(GurError::InvalidParameter(format!("μ must lie in (0,1), got {m}")));
        }
        Ok(CatalogRule::Mu(m))
    }

    /// True for the five rules that satisfy every requirement.
    pub fn is_valid(&self) -> bool {
        matches!(
            self,
            CatalogRule::Luders | CatalogRule::LocLuders | CatalogRule::Passive | CatalogRule::Dep | CatalogRule::Lambda(_)
        )
    }
}

fn check_unit_interval(sym: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(GurError::InvalidParameter(format!("{sym} must lie in [0,1], got {v}")));
    }
    Ok(())
}

impl fmt::Display for CatalogRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogRule::Luders => write!(f, "luders"),
            CatalogRule::LocLuders => write!(f, "loc-luders"),
            CatalogRule::Passive => write!(f, "passive"),
            CatalogRule::Dep => write!(f, "dep"),
            CatalogRule::Lambda(l) => write!(f, "lambda:{l}"),
            CatalogRule::CcDep => write!(f, "cc-dep"),
            CatalogRule::CcLambda(l) => write!(f, "cc-lambda:{l}"),
            CatalogRule::Mu(m) => write!(f, "mu:{m}"),
            CatalogRule::VonNeumann {
                reference: Reference::Computational,
                ..
            } => write!(f, "von-neumann"),
            CatalogRule::VonNeumann {
                reference: Reference::Fourier,
                ..
            } => write!(f, "von-neumann:fourier"),
            CatalogRule::UnitaryKick => write!(f, "unitary-kick"),
        }
    }
}

impl FromStr for CatalogRule {
    type Err = GurError;

    fn from_str(s: &str) -> Result<Self> {
        let (head, param) = match s.split_once(':') {
            Some((h, p)) => (h, Some(p)),
            None => (s, None),
        };
        let number = |p: Option<&str>| -> Result<f64> {
            let p = p.ok_or_else(|| GurError::InvalidParameter(format!("`{s}` needs a parameter, e.g. `{head}:0.5`")))?;
            p.trim()
                .parse::<f64>()
                .map_err(|_| GurError::InvalidParameter(format!("`{p}` is not a number")))
        };
        let bare = |rule: CatalogRule| match param {
            None => Ok(rule),
            Some(_) => Err(GurError::InvalidParameter(format!("`{head}` takes no parameter"))),
        };
        match head {
            "luders" => bare(CatalogRule::Luders),
            "loc-luders" => bare(CatalogRule::LocLuders),
            "passive" => bare(CatalogRule::Passive),
            "dep" => bare(CatalogRule::Dep),
            "cc-dep" => bare(CatalogRule::CcDep),
            "unitary-kick" => bare(CatalogRule::UnitaryKick),
            "lambda" => CatalogRule::lambda(number(param)?),
            "cc-lambda" => CatalogRule::cc_lambda(number(param)?),
            "mu" => CatalogRule::mu(number(param)?),
            "von-neumann" => match param {
                None | Some("computational") => Ok(CatalogRule::von_neumann(Reference::Computational)),
                Some("fourier") => Ok(CatalogRule::von_neumann(Reference::Fourier)),
                Some(p) => Err(GurError::InvalidParameter(format!(
                    "unknown refinement basis `{p}` (use computational or fourier)"
                ))),
            },
            _ => Err(GurError::UnknownRule(s.to_string())),
        }
    }
}

fn single(state: QuantumState) -> Gemenge {
    Gemenge::pure_preparation(state)
}

fn zero(state: &QuantumState) -> QuantumState {
    QuantumState::zero(state.space().clone())
}

/// `Tr(Pσ) · G½ σ G½ / Tr(Gσ)` with `G = (1−λ)P + λI`.
fn lambda_map(l: f64, p: &ComplexMatrix, sigma: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(p.dim());
    let comp = &id - p;
    let mut g = p.scale(1.0 - l);
    g.axpy(crate::linalg::ONE, &id.scale(l));
    let tg = g.trace_product(sigma).re;
    if tg < TRACE_FLOOR {
        return ComplexMatrix::zeros(p.dim());
    }
    let mut g_half = p.clone();
    g_half.axpy(crate::linalg::ONE, &comp.scale(l.sqrt()));
    let born = p.trace_product(sigma).re;
    g_half.conjugate(sigma).scale(born / tg)
}

/// Updates subsystem `k` with `f` and tensors the result with the untouched
/// reduced state of every other subsystem.
fn product_form(state: &QuantumState, k: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<QuantumState> {
    let tr = state.trace();
    if tr < TRACE_FLOOR {
        return Ok(zero(state));
    }
    let space = state.space();
    let sigma = reduce_to(state.matrix(), space, k)?;
    let rest = trace_out(state.matrix(), space, k)?.scale(1.0 / tr);
    state.with_matrix(place(&f(&sigma), &rest, space, k)?)
}

fn luders(q: &ComplexMatrix, state: &QuantumState) -> Result<QuantumState> {
    state.with_matrix(q.conjugate(state.matrix()))
}

fn passive(q: &ComplexMatrix, state: &QuantumState) -> QuantumState {
    let tr = state.trace();
    if tr < TRACE_FLOOR {
        return zero(state);
    }
    state.scaled(q.trace_product(state.matrix()).re / tr)
}

fn maximally_mixed(q: &ComplexMatrix, state: &QuantumState) -> Result<QuantumState> {
    let d = state.space().total_dim();
    let born = q.trace_product(state.matrix()).re;
    state.with_matrix(ComplexMatrix::identity(d).scale(born / d as f64))
}

impl UpdateRule for CatalogRule {
    fn name(&self) -> String {
        self.to_string()
    }

    fn apply(&self, outcome: &Outcome, state: &QuantumState) -> Result<Gemenge> {
        let space = state.space();
        let q = outcome.embedded(space)?;
        let p = &outcome.projector;
        let out = match (self, outcome.target) {
            (CatalogRule::Luders, _) | (CatalogRule::LocLuders, Target::Global) => luders(&q, state)?,
            (CatalogRule::LocLuders, Target::Local(k)) => product_form(state, k, |s| p.conjugate(s))?,
            (CatalogRule::Passive, _) => passive(&q, state),
            (CatalogRule::Dep, Target::Local(k)) => {
                let d = space.subsystem_dim(k)?;
                let rest = trace_out(&q.conjugate(state.matrix()), space, k)?;
                state.with_matrix(place(&ComplexMatrix::identity(d).scale(1.0 / d as f64), &rest, space, k)?)?
            }
            (CatalogRule::Dep, Target::Global) | (CatalogRule::CcDep, _) => maximally_mixed(&q, state)?,
            (CatalogRule::Lambda(l), Target::Local(k)) => product_form(state, k, |s| lambda_map(*l, p, s))?,
            (CatalogRule::Lambda(l), Target::Global) | (CatalogRule::CcLambda(l), _) => {
                state.with_matrix(lambda_map(*l, &q, state.matrix()))?
            }
            (CatalogRule::Mu(m), _) => {
                return Gemenge::new(vec![(1.0 - m, luders(&q, state)?), (*m, passive(&q, state))]);
            }
            (CatalogRule::VonNeumann { reference, frame }, target) => {
                let mut basis = reference.basis(p.dim());
                if let Some(u) = frame {
                    if u.dim() != p.dim() {
                        return Err(GurError::DimensionMismatch {
                            expected: p.dim(),
                            found: u.dim(),
                        });
                    }
                    basis = u.matmul(&basis);
                }
                let items = refine_projector(p, &basis)?
                    .into_iter()
                    .map(|pi| {
                        let qi = match target {
                            Target::Local(k) => embed_local(&pi, space, k)?,
                            Target::Global => pi,
                        };
                        Ok((1.0, luders(&qi, state)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                return Gemenge::new(items);
            }
            (CatalogRule::UnitaryKick, target) => {
                let u = match target {
                    Target::Local(k) => embed_local(&shift_operator(space.subsystem_dim(k)?), space, k)?,
                    Target::Global => shift_operator(space.total_dim()),
                };
                let kicked = state.with_matrix(u.conjugate(state.matrix()))?;
                let tr = state.trace();
                if tr < TRACE_FLOOR {
                    zero(state)
                } else {
                    kicked.scaled(q.trace_product(state.matrix()).re / tr)
                }
            }
        };
        Ok(single(out))
    }

    fn reframed(&self, frame: &ComplexMatrix) -> Option<Box<dyn UpdateRule>> {
        match self {
            CatalogRule::VonNeumann { reference, frame: old } => {
                let composed = match old {
                    Some(o) => frame.matmul(o),
                    None => frame.clone(),
                };
                Some(Box::new(CatalogRule::VonNeumann {
                    reference: *reference,
                    frame: Some(composed),
                }))
            }
            _ => None,
        }
    }

    fn alternative_contexts(&self) -> Vec<String> {
        match self {
            CatalogRule::VonNeumann { .. } => vec!["von-neumann".into(), "von-neumann:fourier".into()],
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{qubit, random_density, random_projector, tensor, Seed, C64};
    use crate::rules::{apply_gemenge, apply_sequence};
    use crate::state::{gemenge_density, CompositeSpace};

    const TOL: f64 = 1e-9;

    fn st(dims: &[usize], m: ComplexMatrix) -> QuantumState {
        QuantumState::new(CompositeSpace::new(dims.to_vec()).unwrap(), m).unwrap()
    }

    fn density(rule: &CatalogRule, o: &Outcome, s: &QuantumState) -> ComplexMatrix {
        gemenge_density(&rule.apply(o, s).unwrap()).unwrap().into_matrix()
    }

    fn p0() -> ComplexMatrix {
        ComplexMatrix::basis_projector(2, 0)
    }

    fn half() -> ComplexMatrix {
        ComplexMatrix::identity(2).scale(0.5)
    }

    fn ket00() -> ComplexMatrix {
        ComplexMatrix::basis_projector(4, 0)
    }

    #[test]
    fn registry_round_trip() {
        for name in [
            "luders",
            "loc-luders",
            "passive",
            "dep",
            "lambda:0.25",
            "lambda:0",
            "cc-dep",
            "cc-lambda:0.5",
            "mu:0.5",
            "von-neumann",
            "von-neumann:fourier",
            "unitary-kick",
        ] {
            assert_eq!(name.parse::<CatalogRule>().unwrap().to_string(), name);
        }
        assert!(matches!("nosuch".parse::<CatalogRule>(), Err(GurError::UnknownRule(_))));
        assert!(matches!("lambda:1.5".parse::<CatalogRule>(), Err(GurError::InvalidParameter(_))));
        assert!(matches!("mu:1".parse::<CatalogRule>(), Err(GurError::InvalidParameter(_))));
        assert!(matches!("mu".parse::<CatalogRule>(), Err(GurError::InvalidParameter(_))));
        assert!(matches!("luders:2".parse::<CatalogRule>(), Err(GurError::InvalidParameter(_))));
    }

    #[test]
    fn luders_examples() {
        let phi = st(&[2, 2], qubit::phi_plus());
        let out = density(&CatalogRule::Luders, &Outcome::local(p0(), 0), &phi);
        assert!(out.approx_eq(&ket00().scale(0.5), TOL));
        let rho = st(&[3], random_density(3, 2, Seed(1)));
        let out = density(&CatalogRule::Luders, &Outcome::global(ComplexMatrix::identity(3)), &rho);
        assert!(out.approx_eq(rho.matrix(), TOL));
        let orth = density(
            &CatalogRule::Luders,
            &Outcome::local(ComplexMatrix::basis_projector(2, 1), 0),
            &st(&[2, 2], ket00()),
        );
        assert!(orth.max_abs() < TOL);
    }

    #[test]
    fn luders_rejects_bad_dimensions() {
        let s = st(&[2, 2], ket00());
        assert!(CatalogRule::Luders.apply(&Outcome::local(ComplexMatrix::identity(3), 0), &s).is_err());
    }

    #[test]
    fn locally_luders_examples() {
        let phi = st(&[2, 2], qubit::phi_plus());
        let out = density(&CatalogRule::LocLuders, &Outcome::local(p0(), 0), &phi);
        assert!(out.approx_eq(&tensor(&p0(), &half()).scale(0.5), TOL));
        let out = density(&CatalogRule::LocLuders, &Outcome::local(ComplexMatrix::identity(2), 0), &phi);
        assert!(out.approx_eq(&tensor(&half(), &half()), TOL));
        let a = random_density(2, 2, Seed(2));
        let b = random_density(3, 2, Seed(3));
        let p = random_projector(2, 1, Seed(4));
        let out = density(&CatalogRule::LocLuders, &Outcome::local(p.clone(), 0), &st(&[2, 3], tensor(&a, &b)));
        assert!(out.approx_eq(&tensor(&p.conjugate(&a), &b), TOL));
    }

    #[test]
    fn passive_examples() {
        let phi = st(&[2, 2], qubit::phi_plus());
        let out = density(&CatalogRule::Passive, &Outcome::local(p0(), 0), &phi);
        assert!(out.approx_eq(&qubit::phi_plus().scale(0.5), TOL));
        let certain = density(&CatalogRule::Passive, &Outcome::local(p0(), 0), &st(&[2, 2], ket00()));
        assert!(certain.approx_eq(&ket00(), TOL));
    }

    #[test]
    fn passive_on_both_preparations() {
        let q = |v: Vec<C64>| st(&[2], ComplexMatrix::pure(&v));
        let z = Gemenge::new(vec![(0.5, q(qubit::ket0())), (0.5, q(qubit::ket1()))]).unwrap();
        let x = Gemenge::new(vec![(0.5, q(qubit::ket_plus())), (0.5, q(qubit::ket_minus()))]).unwrap();
        let o = Outcome::local(p0(), 0);
        let gz = gemenge_density(&apply_gemenge(&CatalogRule::Passive, &o, &z).unwrap()).unwrap();
        let gx = gemenge_density(&apply_gemenge(&CatalogRule::Passive, &o, &x).unwrap()).unwrap();
        assert!(gz.matrix().approx_eq(&p0().scale(0.5), TOL));
        assert!(gx.matrix().approx_eq(&ComplexMatrix::identity(2).scale(0.25), TOL));
    }

    #[test]
    fn depolarising_examples() {
        let s = st(&[2, 2], ket00());
        let local = density(&CatalogRule::Dep, &Outcome::local(p0(), 0), &s);
        assert!(local.approx_eq(&tensor(&half(), &p0()), TOL));
        let global = density(&CatalogRule::Dep, &Outcome::global(tensor(&p0(), &ComplexMatrix::identity(2))), &s);
        assert!(global.approx_eq(&tensor(&half(), &half()), TOL));
        let rho = st(&[2, 3], random_density(6, 3, Seed(5)));
        let triv = density(&CatalogRule::Dep, &Outcome::local(ComplexMatrix::identity(2), 0), &rho);
        let rest = trace_out(rho.matrix(), rho.space(), 0).unwrap();
        assert!(triv.approx_eq(&tensor(&half(), &rest), TOL));
    }

    #[test]
    fn lambda_quarter_on_plus() {
        let plus = st(&[2], ComplexMatrix::pure(&qubit::ket_plus()));
        let out = density(&CatalogRule::Lambda(0.25), &Outcome::local(p0(), 0), &plus);
        // ½ · (|0⟩ + ½|1⟩)(⟨0| + ½⟨1|) / (5/4)
        let v = [C64::new(1.0, 0.0), C64::new(0.5, 0.0)];
        let expected = ComplexMatrix::pure(&v).scale(0.5 / 1.25);
        assert!(out.approx_eq(&expected, TOL), "{out:?}");
    }

    #[test]
    fn lambda_endpoints() {
        for s in 0..20 {
            let rho = st(&[2, 3], random_density(6, 1 + s as usize % 6, Seed(s)));
            let o = Outcome::local(random_projector(3, 1 + s as usize % 3, Seed(100 + s)), 1);
            let l0 = density(&CatalogRule::Lambda(0.0), &o, &rho);
            assert!(l0.approx_eq(&density(&CatalogRule::LocLuders, &o, &rho), TOL));
            let single = st(&[4], random_density(4, 2, Seed(200 + s)));
            let o1 = Outcome::local(random_projector(4, 2, Seed(300 + s)), 0);
            let l1 = density(&CatalogRule::Lambda(1.0), &o1, &single);
            assert!(l1.approx_eq(&density(&CatalogRule::Passive, &o1, &single), TOL));
        }
    }

    #[test]
    fn lambda_zero_guard() {
        let z = QuantumState::zero(CompositeSpace::single(2).unwrap());
        let out = density(&CatalogRule::Lambda(0.0), &Outcome::local(p0(), 0), &z);
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn cc_dep_examples() {
        let s = st(&[2, 2], ket00());
        // |00⟩ lies entirely inside |0⟩⟨0| ⊗ I, so the Born factor is 1.
        let out = density(&CatalogRule::CcDep, &Outcome::local(p0(), 0), &s);
        assert!(out.approx_eq(&ComplexMatrix::identity(4).scale(0.25), TOL));
        let phi = st(&[2, 2], qubit::phi_plus());
        let out = density(&CatalogRule::CcDep, &Outcome::local(p0(), 0), &phi);
        assert!(out.approx_eq(&ComplexMatrix::identity(4).scale(0.5 / 4.0), TOL));
        let mut sum = ComplexMatrix::zeros(4);
        for k in 0..2 {
            sum = &sum + &density(&CatalogRule::CcDep, &Outcome::local(ComplexMatrix::basis_projector(2, k), 0), &s);
        }
        let reduced = reduce_to(&sum, s.space(), 1).unwrap();
        assert!(reduced.approx_eq(&half(), TOL));
        assert!(reduced.distance(&p0()) > 0.4);
    }

    #[test]
    fn cc_lambda_endpoints() {
        let rho = st(&[2, 2], random_density(4, 3, Seed(6)));
        let o = Outcome::local(random_projector(2, 1, Seed(7)), 1);
        let l0 = density(&CatalogRule::CcLambda(0.0), &o, &rho);
        assert!(l0.approx_eq(&density(&CatalogRule::Luders, &o, &rho), TOL));
        let l1 = density(&CatalogRule::CcLambda(1.0), &o, &rho);
        assert!(l1.approx_eq(&density(&CatalogRule::Passive, &o, &rho), TOL));
    }

    #[test]
    fn mu_orderings() {
        let mu = 0.5;
        let rule = CatalogRule::Mu(mu);
        let phi = Gemenge::pure_preparation(st(&[2, 2], qubit::phi_plus()));
        let x = Outcome::local(p0(), 0);
        let y = Outcome::local(ComplexMatrix::basis_projector(2, 1), 1);
        let xy = gemenge_density(&apply_sequence(&rule, &[x.clone(), y.clone()], &phi).unwrap()).unwrap();
        let yx = gemenge_density(&apply_sequence(&rule, &[y, x], &phi).unwrap()).unwrap();
        let mut e_xy = ComplexMatrix::basis_projector(4, 3).scale(1.0 - mu);
        e_xy.axpy(C64::new(mu, 0.0), &qubit::phi_plus());
        let mut e_yx = ComplexMatrix::basis_projector(4, 0).scale(1.0 - mu);
        e_yx.axpy(C64::new(mu, 0.0), &qubit::phi_plus());
        assert!(xy.matrix().approx_eq(&e_xy.scale(mu / 4.0), TOL));
        assert!(yx.matrix().approx_eq(&e_yx.scale(mu / 4.0), TOL));
    }

    #[test]
    fn mu_total_trace_is_born() {
        let rho = st(&[3], random_density(3, 3, Seed(8)));
        let o = Outcome::local(random_projector(3, 2, Seed(9)), 0);
        let g = CatalogRule::Mu(0.3).apply(&o, &rho).unwrap();
        assert_eq!(g.len(), 2);
        assert!((g.total_trace() - o.probability(&rho).unwrap()).abs() < TOL);
    }

    #[test]
    fn von_neumann_examples() {
        let rho = st(&[3], random_density(3, 2, Seed(10)));
        let p = random_projector(3, 1, Seed(11));
        let o = Outcome::local(p, 0);
        let vn = density(&CatalogRule::von_neumann(Reference::Computational), &o, &rho);
        assert!(vn.approx_eq(&density(&CatalogRule::Luders, &o, &rho), TOL));

        let plus = st(&[2], ComplexMatrix::pure(&qubit::ket_plus()));
        let all = Outcome::local(ComplexMatrix::identity(2), 0);
        let z = density(&CatalogRule::von_neumann(Reference::Computational), &all, &plus);
        let x = density(&CatalogRule::von_neumann(Reference::Fourier), &all, &plus);
        assert!(z.approx_eq(&half(), TOL));
        assert!(x.approx_eq(plus.matrix(), TOL));
    }

    #[test]
    fn von_neumann_on_products() {
        let a = random_density(3, 3, Seed(12));
        let b = random_density(2, 2, Seed(13));
        let p = random_projector(3, 2, Seed(14));
        let rule = CatalogRule::von_neumann(Reference::Computational);
        let joint = density(&rule, &Outcome::local(p.clone(), 0), &st(&[3, 2], tensor(&a, &b)));
        let local = density(&rule, &Outcome::local(p, 0), &st(&[3], a));
        assert!(joint.approx_eq(&tensor(&local, &b), TOL));
    }

    #[test]
    fn refinement_errors() {
        let p = ComplexMatrix::basis_projector(2, 0);
        assert!(refine_projector(&p, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn unitary_kick_examples() {
        let zero_state = st(&[2], p0());
        let out = density(&CatalogRule::UnitaryKick, &Outcome::local(p0(), 0), &zero_state);
        assert!(out.approx_eq(&ComplexMatrix::basis_projector(2, 1), TOL));
        let h = qubit::hadamard();
        let rotated = st(&[2], h.conjugate(&p0()));
        let lhs = density(&CatalogRule::UnitaryKick, &Outcome::local(h.conjugate(&p0()), 0), &rotated);
        let rhs = h.conjugate(&out);
        assert!(lhs.distance(&rhs) > 0.4);
    }
}
