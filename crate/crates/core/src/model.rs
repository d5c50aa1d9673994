//! Declarative model description: sites, Hamiltonian terms, reservoir
//! attachments, and the line-oriented file format they are parsed from.
//!
//! ```text
//! sites <N>
//! onsite <i> <energy>
//! hop <i> <j> <amplitude>
//! density <i> <j> <strength>
//! reservoir <name> <i> <j> <gamma> <fermi>
//! profile <name> <t_start> <value>     # repeatable; |u(t)|^2 steps
//! init fock <bitstring of length N>
//! ```
//!
//! `#` starts a comment. Energies are in units of J with hbar = 1. A
//! reservoir with no `profile` lines has the constant profile 1; with
//! them, `|u(t)|^2` is the piecewise-constant step function whose first
//! step must start at 0.
//!
//! Hamiltonians are assembled from the Jordan-Wigner ladder operators,
//! `H = sum_i eps_i d+_i d_i + sum_ij t_ij (d+_i d_j + d+_j d_i)
//!      + sum_ij U_ij N_i N_j`.
//! Note that for adjacent sites `d+_i d_(i+1) = -sigma_+^(i) sigma_-^(i+1)`,
//! i.e. the hop amplitude differs by a sign gauge from the bare Pauli
//! hopping form; occupation, population, concurrence and entropy
//! observables are invariant under that relabeling.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{herm_eigvals, PSD_EIG_TOL};
use crate::operator::{
    annihilator, creator, number_op, FockLabel, Operator, SiteIndex,
};

/// Largest register the dense representation is willing to handle; the
/// superoperator at N = 6 is already 4096 x 4096.
pub const MAX_SITES: usize = 6;

/// One term of the system Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianTerm {
    /// `energy * d+_i d_i`
    Onsite { site: SiteIndex, energy: f64 },
    /// `amplitude * (d+_i d_j + d+_j d_i)`, distinct sites
    Hop {
        sites: (SiteIndex, SiteIndex),
        amplitude: f64,
    },
    /// `strength * N_i N_j`, distinct sites
    DensityDensity {
        sites: (SiteIndex, SiteIndex),
        strength: f64,
    },
}

/// Piecewise-constant time profile for `|u(t)|^2`.
///
/// Steps are `(t_start, value)` with strictly increasing starts; the last
/// step extends to `end` (unbounded when `None`). Coverage begins at the
/// first start.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile {
    steps: Vec<(f64, f64)>,
    end: Option<f64>,
}

impl TimeProfile {
    /// The default profile, identically 1 on `[0, inf)`.
    pub fn constant() -> Self {
        TimeProfile {
            steps: vec![(0.0, 1.0)],
            end: None,
        }
    }

    pub fn from_steps(steps: Vec<(f64, f64)>, end: Option<f64>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidModel("profile has no steps".into()));
        }
        for w in steps.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidModel(format!(
                    "profile steps must have strictly increasing start times ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some((_, v)) = steps.iter().find(|(_, v)| *v < 0.0) {
            return Err(Error::InvalidModel(format!(
                "profile value {v} is negative"
            )));
        }
        if let Some(end) = end {
            if end <= steps.last().unwrap().0 {
                return Err(Error::InvalidModel(
                    "profile end must lie beyond the last step start".into(),
                ));
            }
        }
        Ok(TimeProfile { steps, end })
    }

    pub fn is_constant_one(&self) -> bool {
        self.steps == [(0.0, 1.0)] && self.end.is_none()
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn coverage_start(&self) -> f64 {
        self.steps[0].0
    }

    pub fn coverage_end(&self) -> f64 {
        self.end.unwrap_or(f64::INFINITY)
    }

    /// Value at `t`, or `None` outside the covered interval.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        if t < self.coverage_start() || t >= self.coverage_end() {
            return None;
        }
        self.steps
            .iter()
            .rev()
            .find(|(start, _)| *start <= t)
            .map(|(_, v)| *v)
    }
}

/// A reservoir coupled to the system through jump sites `(i, j)` with
/// aggregate rate `gamma`, Fermi factor `fermi`, and a time profile
/// multiplying the rate. `i = j` is the ordinary diagonal coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirAttachment {
    pub name: String,
    pub jump_sites: (SiteIndex, SiteIndex),
    pub gamma: f64,
    pub fermi: f64,
    pub profile: TimeProfile,
}

/// Rate `Gamma(t) = gamma * |u(t)|^2` of an attachment.
pub fn rate_at(att: &ReservoirAttachment, t: f64) -> Result<f64> {
    att.profile
        .value_at(t)
        .map(|v| att.gamma * v)
        .ok_or(Error::ProfileCoverage {
            name: att.name.clone(),
            t,
        })
}

/// Fermi distribution `f = 1 / (1 + e^(beta eps))` with `eps` measured
/// from the chemical potential. Monotone decreasing in `eps`; `f = 1/2`
/// at `eps = 0`.
pub fn fermi_factor(beta: f64, eps: f64) -> f64 {
    assert!(beta >= 0.0, "inverse temperature must be nonnegative");
    1.0 / (1.0 + (beta * eps).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Fock(FockLabel),
    Density(Operator),
}

/// Validated model: register size, Hamiltonian terms, reservoir
/// attachments, initial state. Immutable after construction except for
/// the explicit parameter-override helpers.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    n_sites: usize,
    terms: Vec<HamiltonianTerm>,
    reservoirs: Vec<ReservoirAttachment>,
    initial_state: InitialState,
}

impl ModelSpec {
    pub fn new(
        n_sites: usize,
        terms: Vec<HamiltonianTerm>,
        reservoirs: Vec<ReservoirAttachment>,
        initial_state: InitialState,
    ) -> Result<Self> {
        let spec = ModelSpec {
            n_sites,
            terms,
            reservoirs,
            initial_state,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::InvalidModel("sites must be >= 1".into()));
        }
        if self.n_sites > MAX_SITES {
            return Err(Error::InvalidModel(format!(
                "sites {} exceeds the dense-representation limit {MAX_SITES}",
                self.n_sites
            )));
        }
        for term in &self.terms {
            match term {
                HamiltonianTerm::Onsite { site, .. } => {
                    site.check(self.n_sites)?;
                }
                HamiltonianTerm::Hop { sites, .. }
                | HamiltonianTerm::DensityDensity { sites, .. } => {
                    sites.0.check(self.n_sites)?;
                    sites.1.check(self.n_sites)?;
                    if sites.0 == sites.1 {
                        return Err(Error::InvalidModel(format!(
                            "two-site term references site {} twice",
                            sites.0
                        )));
                    }
                }
            }
        }
        for att in &self.reservoirs {
            att.jump_sites.0.check(self.n_sites)?;
            att.jump_sites.1.check(self.n_sites)?;
            if att.gamma < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "reservoir \"{}\": gamma {} is negative",
                    att.name, att.gamma
                )));
            }
            if !(0.0..=1.0).contains(&att.fermi) {
                return Err(Error::InvalidModel(format!(
                    "reservoir \"{}\": fermi {} outside [0, 1]",
                    att.name, att.fermi
                )));
            }
        }
        match &self.initial_state {
            InitialState::Fock(label) => {
                if label.n_sites() != self.n_sites {
                    return Err(Error::InvalidState(format!(
                        "Fock label has {} sites, model has {}",
                        label.n_sites(),
                        self.n_sites
                    )));
                }
            }
            InitialState::Density(rho) => {
                validate_density(rho, 1 << self.n_sites)?;
            }
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn reservoirs(&self) -> &[ReservoirAttachment] {
        &self.reservoirs
    }

    pub fn initial_state(&self) -> &InitialState {
        &self.initial_state
    }

    /// Initial density matrix of dimension `2^N`.
    pub fn initial_density(&self) -> Operator {
        match &self.initial_state {
            InitialState::Fock(label) => label.projector(),
            InitialState::Density(rho) => rho.clone(),
        }
    }

    /// Override the strength of the density-density term on `(a, b)`;
    /// errors when no such term exists.
    pub fn set_density_strength(&mut self, a: SiteIndex, b: SiteIndex, strength: f64) -> Result<()> {
        for term in &mut self.terms {
            if let HamiltonianTerm::DensityDensity { sites, strength: s } = term {
                if (sites.0 == a && sites.1 == b) || (sites.0 == b && sites.1 == a) {
                    *s = strength;
                    return Ok(());
                }
            }
        }
        Err(Error::InvalidModel(format!(
            "no density term on sites ({a}, {b}) to override"
        )))
    }

    /// Earliest coverage end over all reservoir profiles.
    pub fn profile_coverage_end(&self) -> f64 {
        self.reservoirs
            .iter()
            .map(|a| a.profile.coverage_end())
            .fold(f64::INFINITY, f64::min)
    }

    /// Render in the model-file format. Only Fock initial states have a
    /// textual form.
    pub fn serialize(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("sites {}\n", self.n_sites));
        for term in &self.terms {
            match term {
                HamiltonianTerm::Onsite { site, energy } => {
                    out.push_str(&format!("onsite {site} {energy}\n"));
                }
                HamiltonianTerm::Hop { sites, amplitude } => {
                    out.push_str(&format!("hop {} {} {amplitude}\n", sites.0, sites.1));
                }
                HamiltonianTerm::DensityDensity { sites, strength } => {
                    out.push_str(&format!("density {} {} {strength}\n", sites.0, sites.1));
                }
            }
        }
        for att in &self.reservoirs {
            out.push_str(&format!(
                "reservoir {} {} {} {} {}\n",
                att.name, att.jump_sites.0, att.jump_sites.1, att.gamma, att.fermi
            ));
        }
        for att in &self.reservoirs {
            if !att.profile.is_constant_one() {
                for (start, value) in att.profile.steps() {
                    out.push_str(&format!("profile {} {start} {value}\n", att.name));
                }
            }
        }
        match &self.initial_state {
            InitialState::Fock(label) => {
                out.push_str(&format!("init fock {label}\n"));
            }
            InitialState::Density(_) => {
                return Err(Error::InvalidModel(
                    "explicit density-matrix initial states have no textual form".into(),
                ));
            }
        }
        Ok(out)
    }
}

fn validate_density(rho: &Operator, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::DimMismatch(rho.dim(), dim));
    }
    let defect = rho.hermiticity_defect();
    if defect > 1e-9 {
        return Err(Error::InvalidState(format!(
            "initial density matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "initial density matrix has trace {tr} instead of 1"
        )));
    }
    let herm = Operator::from_array((rho.as_array() + &rho.dag().into_array()) / C64::new(2.0, 0.0))?;
    let w = herm_eigvals(&herm)?;
    if let Some(&bad) = w.iter().find(|&&x| x < -PSD_EIG_TOL) {
        return Err(Error::InvalidState(format!(
            "initial density matrix has negative eigenvalue {bad:.3e}"
        )));
    }
    Ok(())
}

/// System Hamiltonian of a validated model, built from Jordan-Wigner
/// operators; Hermitian by construction.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<Operator> {
    let n = spec.n_sites();
    let dim = 1usize << n;
    let mut h = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
    for term in spec.terms() {
        match *term {
            HamiltonianTerm::Onsite { site, energy } => {
                let num = &creator(site, n)? * &annihilator(site, n)?;
                h = h + num.as_array().mapv(|z| z * energy);
            }
            HamiltonianTerm::Hop { sites: (i, j), amplitude } => {
                let fwd = &creator(i, n)? * &annihilator(j, n)?;
                let hop = &fwd + &fwd.dag();
                h = h + hop.as_array().mapv(|z| z * amplitude);
            }
            HamiltonianTerm::DensityDensity { sites: (i, j), strength } => {
                let nn = &number_op(i, n)? * &number_op(j, n)?;
                h = h + nn.as_array().mapv(|z| z * strength);
            }
        }
    }
    Operator::hermitian_from_array(h)
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num(tok: &str, what: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| perr(line, format!("cannot parse {what} \"{tok}\" as a number")))
}

fn parse_site(tok: &str, n_sites: usize, line: usize) -> Result<SiteIndex> {
    let v: usize = tok
        .parse()
        .map_err(|_| perr(line, format!("cannot parse site index \"{tok}\"")))?;
    let site = SiteIndex::new(v).map_err(|_| perr(line, "site index must be >= 1"))?;
    site.check(n_sites)
        .map_err(|_| perr(line, format!("site index {v} out of range 1..={n_sites}")))
}

/// Parse and validate a model file; every violation is reported with its
/// line number.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let mut n_sites: Option<usize> = None;
    let mut terms = Vec::new();
    let mut reservoirs: Vec<ReservoirAttachment> = Vec::new();
    // profile steps collected per name, attached after the pass
    let mut profiles: Vec<(String, usize, Vec<(f64, f64)>)> = Vec::new();
    let mut init: Option<(usize, FockLabel)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let directive = tokens[0];
        let args = &tokens[1..];
        let expect = |n: usize| -> Result<()> {
            if args.len() != n {
                Err(perr(
                    line_no,
                    format!("{directive} expects {n} arguments, got {}", args.len()),
                ))
            } else {
                Ok(())
            }
        };
        let sites_declared = |n_sites: &Option<usize>| -> Result<usize> {
            n_sites.ok_or_else(|| perr(line_no, "\"sites\" must be declared first"))
        };

        match directive {
            "sites" => {
                expect(1)?;
                if n_sites.is_some() {
                    return Err(perr(line_no, "duplicate \"sites\" directive"));
                }
                let n: usize = args[0]
                    .parse()
                    .map_err(|_| perr(line_no, format!("cannot parse site count \"{}\"", args[0])))?;
                if n == 0 {
                    return Err(perr(line_no, "sites must be >= 1"));
                }
                if n > MAX_SITES {
                    return Err(perr(
                        line_no,
                        format!("sites {n} exceeds the dense-representation limit {MAX_SITES}"),
                    ));
                }
                n_sites = Some(n);
            }
            "onsite" => {
                expect(2)?;
                let n = sites_declared(&n_sites)?;
                terms.push(HamiltonianTerm::Onsite {
                    site: parse_site(args[0], n, line_no)?,
                    energy: parse_num(args[1], "energy", line_no)?,
                });
            }
            "hop" | "density" => {
                expect(3)?;
                let n = sites_declared(&n_sites)?;
                let a = parse_site(args[0], n, line_no)?;
                let b = parse_site(args[1], n, line_no)?;
                if a == b {
                    return Err(perr(line_no, format!("{directive} sites must be distinct")));
                }
                let value = parse_num(args[2], "strength", line_no)?;
                terms.push(if directive == "hop" {
                    HamiltonianTerm::Hop {
                        sites: (a, b),
                        amplitude: value,
                    }
                } else {
                    HamiltonianTerm::DensityDensity {
                        sites: (a, b),
                        strength: value,
                    }
                });
            }
            "reservoir" => {
                expect(5)?;
                let n = sites_declared(&n_sites)?;
                let name = args[0].to_string();
                if reservoirs.iter().any(|r| r.name == name) {
                    return Err(perr(line_no, format!("duplicate reservoir name \"{name}\"")));
                }
                let i = parse_site(args[1], n, line_no)?;
                let j = parse_site(args[2], n, line_no)?;
                let gamma = parse_num(args[3], "gamma", line_no)?;
                if gamma < 0.0 {
                    return Err(perr(line_no, format!("gamma {gamma} must be nonnegative")));
                }
                let fermi = parse_num(args[4], "fermi", line_no)?;
                if !(0.0..=1.0).contains(&fermi) {
                    return Err(perr(line_no, format!("fermi {fermi} outside [0, 1]")));
                }
                reservoirs.push(ReservoirAttachment {
                    name,
                    jump_sites: (i, j),
                    gamma,
                    fermi,
                    profile: TimeProfile::constant(),
                });
            }
            "profile" => {
                expect(3)?;
                let name = args[0].to_string();
                let t_start = parse_num(args[1], "start time", line_no)?;
                let value = parse_num(args[2], "value", line_no)?;
                if value < 0.0 {
                    return Err(perr(line_no, format!("profile value {value} is negative")));
                }
                match profiles.iter_mut().find(|(n, _, _)| *n == name) {
                    Some((_, _, steps)) => steps.push((t_start, value)),
                    None => profiles.push((name, line_no, vec![(t_start, value)])),
                }
            }
            "init" => {
                expect(2)?;
                let n = sites_declared(&n_sites)?;
                if init.is_some() {
                    return Err(perr(line_no, "duplicate \"init\" directive"));
                }
                if args[0] != "fock" {
                    return Err(perr(
                        line_no,
                        format!("unknown init kind \"{}\" (expected \"fock\")", args[0]),
                    ));
                }
                let label = FockLabel::parse(args[1])
                    .map_err(|e| perr(line_no, e.to_string()))?;
                if label.n_sites() != n {
                    return Err(perr(
                        line_no,
                        format!("Fock label length {} does not match sites {n}", label.n_sites()),
                    ));
                }
                init = Some((line_no, label));
            }
            other => {
                return Err(perr(line_no, format!("unknown directive \"{other}\"")));
            }
        }
    }

    let n = n_sites.ok_or_else(|| Error::InvalidModel("missing \"sites\" directive".into()))?;

    for (name, first_line, steps) in profiles {
        let att = reservoirs
            .iter_mut()
            .find(|r| r.name == name)
            .ok_or_else(|| perr(first_line, format!("profile references unknown reservoir \"{name}\"")))?;
        if steps[0].0 != 0.0 {
            return Err(perr(
                first_line,
                format!("profile \"{name}\" must start at t = 0 to cover [0, t_max)"),
            ));
        }
        att.profile = TimeProfile::from_steps(steps, None)
            .map_err(|e| perr(first_line, e.to_string()))?;
    }

    let initial_state = match init {
        Some((_, label)) => InitialState::Fock(label),
        // default: every site empty
        None => InitialState::Fock(FockLabel::new(vec![false; n])?),
    };

    ModelSpec::new(n, terms, reservoirs, initial_state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{commutator, number_op};

    fn site(i: usize) -> SiteIndex {
        SiteIndex::new(i).unwrap()
    }

    #[test]
    fn parse_minimal_model() {
        let text = "sites 1\nonsite 1 0.0\nreservoir src 1 1 1.0 1.0\n";
        let spec = parse_model(text).unwrap();
        assert_eq!(spec.n_sites(), 1);
        assert_eq!(spec.terms().len(), 1);
        assert_eq!(spec.reservoirs().len(), 1);
        assert!(spec.reservoirs()[0].profile.is_constant_one());
        // default initial state: empty register
        assert_eq!(
            spec.initial_state(),
            &InitialState::Fock(FockLabel::parse("0").unwrap())
        );
    }

    #[test]
    fn parse_reports_line_numbers_and_bounds() {
        let text = "sites 1\nreservoir src 1 1 1.0 1.5\n";
        match parse_model(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("[0, 1]"), "message should name the bound: {msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        let text = "sites 2\nfrobnicate 1\n";
        match parse_model(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("frobnicate"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        assert!(matches!(
            parse_model("sites 2\nonsite 3 1.0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_model("sites 1\nreservoir s 1 1 -0.5 0.0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_model("sites 2\nhop 1 1 0.3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn parse_profile_attachment() {
        let text = "sites 1\nreservoir src 1 1 2.0 1.0\nprofile src 0 0\nprofile src 5 1\n";
        let spec = parse_model(text).unwrap();
        let att = &spec.reservoirs()[0];
        assert_eq!(rate_at(att, 3.0).unwrap(), 0.0);
        assert_eq!(rate_at(att, 7.0).unwrap(), 2.0);
        assert_eq!(rate_at(att, 5.0).unwrap(), 2.0);

        // profile naming a missing reservoir
        assert!(matches!(
            parse_model("sites 1\nprofile ghost 0 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        // coverage must start at zero
        assert!(matches!(
            parse_model("sites 1\nreservoir s 1 1 1.0 0.0\nprofile s 2 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn rate_outside_coverage_errors() {
        let att = ReservoirAttachment {
            name: "s".into(),
            jump_sites: (site(1), site(1)),
            gamma: 1.0,
            fermi: 0.0,
            profile: TimeProfile::from_steps(vec![(0.0, 1.0)], Some(10.0)).unwrap(),
        };
        assert_eq!(rate_at(&att, 9.999).unwrap(), 1.0);
        assert!(matches!(
            rate_at(&att, 10.0),
            Err(Error::ProfileCoverage { .. })
        ));
    }

    #[test]
    fn fermi_factor_values() {
        assert_eq!(fermi_factor(1.0, 0.0), 0.5);
        assert!((fermi_factor(1.0, 3.0f64.ln()) - 0.25).abs() < 1e-15);
        assert!((fermi_factor(1e6, -1.0) - 1.0).abs() < 1e-12);
        assert!(fermi_factor(1e6, 1.0) < 1e-12);
        // f(beta, eps) + f(beta, -eps) = 1
        for k in 0..50 {
            let eps = -5.0 + 0.2 * k as f64;
            let s = fermi_factor(0.7, eps) + fermi_factor(0.7, -eps);
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_single_site() {
        let spec = parse_model("sites 1\nonsite 1 2.0\n").unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        assert_eq!(h.as_array()[[0, 0]], C64::new(2.0, 0.0));
        assert_eq!(h.as_array()[[1, 1]], C64::new(0.0, 0.0));
    }

    #[test]
    fn hop_block_eigenvalues() {
        // single hop of amplitude -Delta: single-particle eigenvalues +-Delta
        let delta = 0.37;
        let spec = parse_model(&format!("sites 2\nhop 1 2 {}\n", -delta)).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        let w = herm_eigvals(&h).unwrap();
        // spectrum: 0 (vacuum), 0 (doubly occupied), +-Delta
        let expect = [delta, 0.0, 0.0, -delta];
        for (a, b) in w.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12, "{w:?}");
        }
    }

    #[test]
    fn hamiltonian_conserves_particle_number() {
        let text = "sites 4\nonsite 1 0.3\nonsite 2 -0.2\nhop 1 2 0.5\nhop 2 3 -0.1\nhop 1 4 0.7\ndensity 1 3 0.75\ndensity 2 4 0.25\n";
        let spec = parse_model(text).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        let mut total = Operator::zeros(16).unwrap();
        for i in 1..=4 {
            total = &total + &number_op(site(i), 4).unwrap();
        }
        assert!(commutator(&h, &total).max_abs() < 1e-12);
    }

    #[test]
    fn two_qubit_block_spectrum_of_molecule_model() {
        // two coupled two-site molecules at the Bell-generation parameters;
        // the one-particle-per-molecule block has spectrum {0, 1/4, 3/4, 1}
        let delta = 3.0f64.sqrt() / 8.0;
        let text = format!(
            "sites 4\nhop 1 2 {nd}\nhop 3 4 {nd}\ndensity 1 3 0.75\ndensity 2 4 0.75\ndensity 1 4 0.25\ndensity 2 3 0.25\n",
            nd = -delta
        );
        let spec = parse_model(&text).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        let block_labels = ["1010", "1001", "0110", "0101"];
        let idx: Vec<usize> = block_labels
            .iter()
            .map(|s| FockLabel::parse(s).unwrap().basis_index())
            .collect();
        let mut block = Array2::from_elem((4, 4), C64::new(0.0, 0.0));
        for (r, &ir) in idx.iter().enumerate() {
            for (c, &ic) in idx.iter().enumerate() {
                block[[r, c]] = h.as_array()[[ir, ic]];
            }
        }
        let w = herm_eigvals(&Operator::from_array(block).unwrap()).unwrap();
        let expect = [1.0, 0.75, 0.25, 0.0];
        for (a, b) in w.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12, "{w:?}");
        }
    }

    #[test]
    fn serialize_round_trip() {
        let text = "sites 3 # three dots\nonsite 1 0.25\nhop 1 2 -0.5\ndensity 1 3 3\nreservoir src 3 3 1.0 1.0\nreservoir drn 3 3 0.5 0.0\nprofile drn 0 0\nprofile drn 2.5 1\ninit fock 101\n";
        let spec = parse_model(text).unwrap();
        let rendered = spec.serialize().unwrap();
        let reparsed = parse_model(&rendered).unwrap();
        assert_eq!(spec, reparsed);
        // serializing again is byte-stable
        assert_eq!(rendered, reparsed.serialize().unwrap());
    }

    #[test]
    fn density_override() {
        let text = "sites 2\ndensity 1 2 3.0\n";
        let mut spec = parse_model(text).unwrap();
        spec.set_density_strength(site(1), site(2), 0.5).unwrap();
        match &spec.terms()[0] {
            HamiltonianTerm::DensityDensity { strength, .. } => assert_eq!(*strength, 0.5),
            other => panic!("unexpected term {other:?}"),
        }
        assert!(spec
            .set_density_strength(site(1), site(1), 1.0)
            .is_err());
    }

    #[test]
    fn initial_density_from_fock() {
        let spec = parse_model("sites 2\ninit fock 10\n").unwrap();
        let rho = spec.initial_density();
        let k = FockLabel::parse("10").unwrap().basis_index();
        assert_eq!(rho.as_array()[[k, k]], C64::new(1.0, 0.0));
        assert_eq!(rho.trace(), C64::new(1.0, 0.0));
    }

    #[test]
    fn explicit_density_initial_state_is_validated() {
        let good = Operator::from_array(Array2::from_diag(&ndarray::arr1(&[
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
        ])))
        .unwrap();
        let spec = ModelSpec::new(1, vec![], vec![], InitialState::Density(good)).unwrap();
        assert!(spec.serialize().is_err());

        let bad_trace = Operator::identity(2).unwrap();
        assert!(ModelSpec::new(1, vec![], vec![], InitialState::Density(bad_trace)).is_err());
    }
}
