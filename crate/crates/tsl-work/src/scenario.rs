//! Scenario configuration: JSON schema, a deliberately tiny expression
//! grammar for inline two-level drives, and the built-in protocols.
//!
//! A scenario fixes the drive, the bath (`β`, `γ₀`, and an optional
//! absorption-rate distortion used to demonstrate detailed-balance
//! rejection), the initial state, the time grid, and output paths.  Inline
//! drives give `q(t)` and `Δ(t)` as expression strings over `t`, `pi`,
//! numbers, `+ − * /`, and `sin`/`cos` with affine time arguments; the
//! derivative needed by the generator assembly is taken symbolically, so
//! inline drives are exactly as accurate as the built-ins.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::array;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{BathSpec, Drive, DriveClass};
use crate::operator_algebra::{c, herm_defect, max_abs, trace, CMat, C64};
use crate::twolevel::{state_from_angle, TwoLevelDrive, TwoLevelProtocol};

/// The time grid must resolve the scenario: `dt ≤ (t1 − t0) / MIN_STEPS`.
pub const MIN_STEPS: f64 = 100.0;

/// Tags of the shipped scenarios.
pub const BUILTIN_TAGS: [&str; 3] = ["fig1a", "fig1b", "fig1c"];

// ---------------------------------------------------------------------------
// Expression grammar
// ---------------------------------------------------------------------------

/// Abstract syntax of the drive-expression grammar.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Time,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    /// Evaluate at time `t`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Time => t,
            Expr::Neg(e) => -e.eval(t),
            Expr::Add(a, b) => a.eval(t) + b.eval(t),
            Expr::Sub(a, b) => a.eval(t) - b.eval(t),
            Expr::Mul(a, b) => a.eval(t) * b.eval(t),
            Expr::Div(a, b) => a.eval(t) / b.eval(t),
            Expr::Sin(e) => e.eval(t).sin(),
            Expr::Cos(e) => e.eval(t).cos(),
        }
    }

    /// True if the expression mentions `t`.
    pub fn depends_on_time(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::Time => true,
            Expr::Neg(e) | Expr::Sin(e) | Expr::Cos(e) => e.depends_on_time(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on_time() || b.depends_on_time()
            }
        }
    }

    /// True if the expression is affine in `t` (no trig nesting, products
    /// with at most one time-dependent factor, constant denominators).
    fn is_affine_in_time(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi | Expr::Time => true,
            Expr::Neg(e) => e.is_affine_in_time(),
            Expr::Add(a, b) | Expr::Sub(a, b) => a.is_affine_in_time() && b.is_affine_in_time(),
            Expr::Mul(a, b) => {
                (a.is_affine_in_time() && !b.depends_on_time())
                    || (b.is_affine_in_time() && !a.depends_on_time())
            }
            Expr::Div(a, b) => a.is_affine_in_time() && !b.depends_on_time(),
            Expr::Sin(_) | Expr::Cos(_) => false,
        }
    }

    /// Symbolic time derivative.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::Pi => Expr::Num(0.0),
            Expr::Time => Expr::Num(1.0),
            Expr::Neg(e) => Expr::Neg(Box::new(e.derivative())),
            Expr::Add(a, b) => Expr::Add(Box::new(a.derivative()), Box::new(b.derivative())),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.derivative()), Box::new(b.derivative())),
            Expr::Mul(a, b) => Expr::Add(
                Box::new(Expr::Mul(Box::new(a.derivative()), b.clone())),
                Box::new(Expr::Mul(a.clone(), Box::new(b.derivative()))),
            ),
            // Denominators are constant by grammar validation.
            Expr::Div(a, b) => Expr::Div(Box::new(a.derivative()), b.clone()),
            Expr::Sin(e) => Expr::Mul(Box::new(e.derivative()), Box::new(Expr::Cos(e.clone()))),
            Expr::Cos(e) => Expr::Neg(Box::new(Expr::Mul(
                Box::new(e.derivative()),
                Box::new(Expr::Sin(e.clone())),
            ))),
        }
    }

    /// Enforce the grammar restrictions: trig arguments affine in `t`,
    /// denominators time-independent.
    fn validate_grammar(&self) -> Result<()> {
        match self {
            Expr::Num(_) | Expr::Pi | Expr::Time => Ok(()),
            Expr::Neg(e) => e.validate_grammar(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.validate_grammar()?;
                b.validate_grammar()
            }
            Expr::Div(a, b) => {
                if b.depends_on_time() {
                    return Err(Error::Config(
                        "expression grammar: denominators must not depend on t".to_string(),
                    ));
                }
                a.validate_grammar()?;
                b.validate_grammar()
            }
            Expr::Sin(e) | Expr::Cos(e) => {
                if !e.is_affine_in_time() {
                    return Err(Error::Config(
                        "expression grammar: sin/cos arguments must be affine in t".to_string(),
                    ));
                }
                e.validate_grammar()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Pi,
    Time,
    Sin,
    Cos,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        match ch {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == '.'
                        || bytes[i] == 'e'
                        || bytes[i] == 'E'
                        || ((bytes[i] == '+' || bytes[i] == '-')
                            && i > start
                            && (bytes[i - 1] == 'e' || bytes[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                let value = text.parse::<f64>().map_err(|_| {
                    Error::Config(format!("expression: invalid number literal '{text}'"))
                })?;
                tokens.push(Token::Num(value));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word: String = bytes[start..i].iter().collect();
                tokens.push(match word.as_str() {
                    "pi" => Token::Pi,
                    "t" => Token::Time,
                    "sin" => Token::Sin,
                    "cos" => Token::Cos,
                    other => {
                        return Err(Error::Config(format!(
                            "expression: unknown identifier '{other}' \
                             (grammar allows t, pi, sin, cos)"
                        )))
                    }
                });
            }
            other => {
                return Err(Error::Config(format!(
                    "expression: unexpected character '{other}'"
                )))
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token, ctx: &str) -> Result<()> {
        match self.bump() {
            Some(ref got) if *got == want => Ok(()),
            got => Err(Error::Config(format!(
                "expression: expected {want:?} {ctx}, found {got:?}"
            ))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::Pi) => Ok(Expr::Pi),
            Some(Token::Time) => Ok(Expr::Time),
            Some(Token::Sin) => {
                self.expect(Token::LParen, "after sin")?;
                let inner = self.expr()?;
                self.expect(Token::RParen, "closing sin argument")?;
                Ok(Expr::Sin(Box::new(inner)))
            }
            Some(Token::Cos) => {
                self.expect(Token::LParen, "after cos")?;
                let inner = self.expr()?;
                self.expect(Token::RParen, "closing cos argument")?;
                Ok(Expr::Cos(Box::new(inner)))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "closing parenthesis")?;
                Ok(inner)
            }
            got => Err(Error::Config(format!(
                "expression: expected a value, found {got:?}"
            ))),
        }
    }
}

/// Parse and validate one drive expression.
pub fn parse_expression(src: &str) -> Result<Expr> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(Error::Config("expression: empty input".to_string()));
    }
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Config(format!(
            "expression: trailing tokens starting at {:?}",
            parser.tokens[parser.pos]
        )));
    }
    expr.validate_grammar()?;
    Ok(expr)
}

/// A two-level drive defined by expression strings, with symbolic
/// derivatives: `H(t) = (q(t)/2)σ_z + (Δ(t)/2)σ_x`.
pub struct ExpressionDrive {
    q: Expr,
    delta: Expr,
    q_dot: Expr,
    delta_dot: Expr,
    label: String,
}

impl ExpressionDrive {
    pub fn new(q_src: &str, delta_src: &str, label: &str) -> Result<Self> {
        let q = parse_expression(q_src)?;
        let delta = parse_expression(delta_src)?;
        let q_dot = q.derivative();
        let delta_dot = delta.derivative();
        Ok(Self {
            q,
            delta,
            q_dot,
            delta_dot,
            label: label.to_string(),
        })
    }

    /// Gap and mixing-angle parameters at `t` (`ω = √(q²+Δ²)`,
    /// `θ = ½·atan2(Δ, q)`).
    pub fn raw_params(&self, t: f64) -> (f64, f64) {
        (self.q.eval(t), self.delta.eval(t))
    }

    /// Mixing angle of the analytic eigenbasis at `t`.
    pub fn theta(&self, t: f64) -> f64 {
        let (q, delta) = self.raw_params(t);
        0.5 * f64::atan2(delta, q)
    }
}

impl Drive for ExpressionDrive {
    fn dim(&self) -> usize {
        2
    }

    fn hamiltonian(&self, t: f64) -> CMat {
        let (q, delta) = self.raw_params(t);
        array![
            [c(0.5 * q, 0.0), c(0.5 * delta, 0.0)],
            [c(0.5 * delta, 0.0), c(-0.5 * q, 0.0)]
        ]
    }

    fn hamiltonian_dot(&self, t: f64) -> Result<CMat> {
        let qd = self.q_dot.eval(t);
        let dd = self.delta_dot.eval(t);
        Ok(array![
            [c(0.5 * qd, 0.0), c(0.5 * dd, 0.0)],
            [c(0.5 * dd, 0.0), c(-0.5 * qd, 0.0)]
        ])
    }

    fn drive_class(&self) -> DriveClass {
        DriveClass::General
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

// ---------------------------------------------------------------------------
// Configuration schema
// ---------------------------------------------------------------------------

/// Drive selection: a built-in tag or an inline expression pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DriveSpec {
    Builtin(String),
    Inline {
        q: String,
        delta: String,
        #[serde(default)]
        label: Option<String>,
    },
}

/// Initial state: energy-basis components at `t0` (in the analytic gauge
/// of the two-level eigenbasis) or a full matrix of `[re, im]` entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialStateSpec {
    EnergyBasis {
        p_plus: f64,
        rho_pm_re: f64,
        rho_pm_im: f64,
    },
    Matrix {
        matrix: Vec<Vec<[f64; 2]>>,
    },
}

/// Optional output-path overrides.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub report: Option<PathBuf>,
}

fn default_absorption_scale() -> f64 {
    1.0
}

/// A complete scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Name used for default output paths and report headers.
    #[serde(default)]
    pub name: Option<String>,
    pub drive: DriveSpec,
    /// Inverse bath temperature.
    pub beta: f64,
    /// Base transition-rate scale `γ₀`.
    pub gamma0: f64,
    /// Multiplier on absorption rates; values ≠ 1 deliberately break
    /// detailed balance and must be rejected by verification.
    #[serde(default = "default_absorption_scale")]
    pub absorption_scale: f64,
    pub initial_state: InitialStateSpec,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioConfig {
    /// One of the shipped scenarios.
    ///
    /// All three use the same bath (`β = γ₀ = 1`) and initial energy-basis
    /// components (`p₊ = 0.3`, `ρ₊₋ = 0.2 + 0.1i`).  The window for
    /// `fig1b` stops at `t = 2.8`: that protocol's gap closes at `t = 3`,
    /// where the Hamiltonian vanishes, the eigenbasis is undefined, and
    /// the bath rates diverge, so no fixed-step integration through that
    /// point is meaningful.  On `[0, 2.8]` every observable is regular.
    pub fn builtin(tag: &str) -> Result<Self> {
        let (protocol_tag, t1) = match tag {
            "fig1a" => ("fig1a", 4.0),
            "fig1b" => ("fig1b", 2.8),
            "fig1c" => ("fig1c", 4.0),
            other => {
                let mut known = String::new();
                for (i, t) in BUILTIN_TAGS.iter().enumerate() {
                    if i > 0 {
                        let _ = write!(known, ", ");
                    }
                    let _ = write!(known, "{t}");
                }
                return Err(Error::Config(format!(
                    "unknown builtin scenario '{other}' (available: {known})"
                )));
            }
        };
        Ok(Self {
            name: Some(tag.to_string()),
            drive: DriveSpec::Builtin(protocol_tag.to_string()),
            beta: 1.0,
            gamma0: 1.0,
            absorption_scale: 1.0,
            initial_state: InitialStateSpec::EnergyBasis {
                p_plus: 0.3,
                rho_pm_re: 0.2,
                rho_pm_im: 0.1,
            },
            t0: 0.0,
            t1,
            dt: 1e-3,
            output: OutputSpec::default(),
        })
    }

    /// True if `tag` names a shipped scenario.
    pub fn is_builtin(tag: &str) -> bool {
        BUILTIN_TAGS.contains(&tag)
    }

    /// Parse a JSON document.
    pub fn from_json(src: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(src)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load from a file path.
    pub fn from_path(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        let cfg = Self::from_json(&src).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        Ok(cfg)
    }

    /// Resolve a CLI argument: builtin tag or config-file path.
    pub fn resolve(arg: &str) -> Result<Self> {
        if Self::is_builtin(arg) {
            Self::builtin(arg)
        } else if arg.ends_with(".json") || Path::new(arg).exists() {
            Self::from_path(Path::new(arg))
        } else {
            Err(Error::Config(format!(
                "'{arg}' is neither a builtin scenario tag nor an existing config file"
            )))
        }
    }

    /// Structural validation (grid, bath positivity, state assembly).
    pub fn validate(&self) -> Result<()> {
        for (label, v) in [("beta", self.beta), ("gamma0", self.gamma0)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!("{label} must be finite and > 0")));
            }
        }
        if !self.absorption_scale.is_finite() || self.absorption_scale <= 0.0 {
            return Err(Error::Config(
                "absorption_scale must be finite and > 0".to_string(),
            ));
        }
        let grid_ordered = self.t1.partial_cmp(&self.t0) == Some(std::cmp::Ordering::Greater);
        if !grid_ordered || !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::Config(
                "time grid requires t1 > t0 and dt > 0".to_string(),
            ));
        }
        if self.dt > (self.t1 - self.t0) / MIN_STEPS {
            return Err(Error::Config(format!(
                "dt = {} is too coarse: at least {} steps required over [{}, {}]",
                self.dt, MIN_STEPS, self.t0, self.t1
            )));
        }
        let drive = self.build_drive()?;
        self.build_initial_state(drive.as_ref())?;
        Ok(())
    }

    /// Bath parameters.
    pub fn bath(&self) -> BathSpec {
        BathSpec {
            beta: self.beta,
            gamma0: self.gamma0,
            absorption_scale: self.absorption_scale,
        }
    }

    /// Instantiate the drive.
    pub fn build_drive(&self) -> Result<Box<dyn Drive>> {
        match &self.drive {
            DriveSpec::Builtin(tag) => {
                let protocol = builtin_protocol(tag)?;
                Ok(Box::new(TwoLevelDrive::new(protocol)))
            }
            DriveSpec::Inline { q, delta, label } => {
                let name = label.clone().unwrap_or_else(|| "inline".to_string());
                Ok(Box::new(ExpressionDrive::new(q, delta, &name)?))
            }
        }
    }

    /// The analytic protocol behind a builtin drive, when there is one;
    /// drives defined by inline expressions have no closed-form oracle.
    pub fn reference_protocol(&self) -> Option<TwoLevelProtocol> {
        match &self.drive {
            DriveSpec::Builtin(tag) => builtin_protocol(tag).ok(),
            DriveSpec::Inline { .. } => None,
        }
    }

    /// Assemble the initial state at `t0`.
    pub fn build_initial_state(&self, drive: &dyn Drive) -> Result<CMat> {
        match &self.initial_state {
            InitialStateSpec::EnergyBasis {
                p_plus,
                rho_pm_re,
                rho_pm_im,
            } => {
                if drive.dim() != 2 {
                    return Err(Error::Config(
                        "energy-basis initial states are defined for two-level drives".to_string(),
                    ));
                }
                let theta = two_level_theta(drive, self.t0)?;
                state_from_angle(theta, *p_plus, c(*rho_pm_re, *rho_pm_im))
            }
            InitialStateSpec::Matrix { matrix } => parse_state_matrix(matrix),
        }
    }

    /// Scenario display name.
    pub fn display_name(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        match &self.drive {
            DriveSpec::Builtin(tag) => tag.clone(),
            DriveSpec::Inline { label, .. } => {
                label.clone().unwrap_or_else(|| "scenario".to_string())
            }
        }
    }

    /// CSV output path (default `<name>.csv`).
    pub fn csv_path(&self) -> PathBuf {
        self.output
            .csv
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.display_name())))
    }

    /// Report output path (default `<name>_report.json`).
    pub fn report_path(&self) -> PathBuf {
        self.output
            .report
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}_report.json", self.display_name())))
    }
}

fn builtin_protocol(tag: &str) -> Result<TwoLevelProtocol> {
    match tag {
        "fig1a" => Ok(TwoLevelProtocol::General),
        "fig1b" => Ok(TwoLevelProtocol::Commuting),
        "fig1c" => Ok(TwoLevelProtocol::Isospectral),
        other => Err(Error::Config(format!(
            "unknown builtin drive tag '{other}'"
        ))),
    }
}

/// Mixing angle of a two-level drive's eigenbasis at `t`, recovered from
/// its Hamiltonian matrix (`q = 2H₀₀`, `Δ = 2 Re H₀₁`).
fn two_level_theta(drive: &dyn Drive, t: f64) -> Result<f64> {
    let h = drive.hamiltonian(t);
    let q = 2.0 * h[(0, 0)].re;
    let delta = 2.0 * h[(0, 1)].re;
    let off_imag = h[(0, 1)].im.abs();
    if off_imag > 1e-12 * max_abs(&h).max(1.0) {
        return Err(Error::Config(
            "energy-basis initial states require a real two-level Hamiltonian".to_string(),
        ));
    }
    if f64::hypot(q, delta) == 0.0 {
        return Err(Error::Config(
            "energy basis undefined at t0: Hamiltonian vanishes".to_string(),
        ));
    }
    Ok(0.5 * f64::atan2(delta, q))
}

fn parse_state_matrix(matrix: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let d = matrix.len();
    if d == 0 || matrix.iter().any(|row| row.len() != d) {
        return Err(Error::Config(
            "initial_state.matrix must be square and non-empty".to_string(),
        ));
    }
    let mut rho = CMat::zeros((d, d));
    for (i, row) in matrix.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            rho[(i, j)] = C64::new(entry[0], entry[1]);
        }
    }
    let scale = max_abs(&rho).max(1.0);
    if herm_defect(&rho) > 1e-9 * scale {
        return Err(Error::Config(
            "initial_state.matrix is not Hermitian".to_string(),
        ));
    }
    let tr = trace(&rho);
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-12 {
        return Err(Error::Config(format!(
            "initial_state.matrix must have unit trace (got {:.12e})",
            tr.re
        )));
    }
    let eig = crate::operator_algebra::hermitian_eigensystem(&rho, None)?;
    if let Some(&min) = eig
        .values
        .iter()
        .min_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"))
    {
        if min < -1e-12 {
            return Err(Error::Config(format!(
                "initial_state.matrix is not positive semidefinite \
                 (minimum eigenvalue {min:.3e})"
            )));
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn expression_evaluation_and_symbolic_derivative() {
        let q = parse_expression("0.5*(1+sin(pi*t/2))").unwrap();
        assert_abs_diff_eq!(q.eval(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(q.eval(1.0), 1.0, epsilon = 1e-15);
        let q_dot = q.derivative();
        assert_abs_diff_eq!(
            q_dot.eval(0.0),
            std::f64::consts::FRAC_PI_4,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(q_dot.eval(1.0), 0.0, epsilon = 1e-15);

        let d = parse_expression("cos(pi*t/2)").unwrap();
        let d_dot = d.derivative();
        assert_abs_diff_eq!(d_dot.eval(0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            d_dot.eval(1.0),
            -std::f64::consts::FRAC_PI_2,
            epsilon = 1e-15
        );

        // Products differentiate by the product rule.
        let sq = parse_expression("t*t - 2*t").unwrap();
        assert_abs_diff_eq!(sq.derivative().eval(3.0), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn expression_grammar_rejections() {
        assert!(parse_expression("sin(sin(t))").is_err());
        assert!(parse_expression("cos(t*t)").is_err());
        assert!(parse_expression("1/t").is_err());
        assert!(parse_expression("foo(t)").is_err());
        assert!(parse_expression("2+").is_err());
        assert!(parse_expression("").is_err());
        assert!(parse_expression("(1+t").is_err());
        assert!(parse_expression("1 2").is_err());
    }

    #[test]
    fn expression_drive_reproduces_builtin_general_drive() {
        let inline = ExpressionDrive::new("0.5*(1+sin(pi*t/2))", "1", "general-inline").unwrap();
        let builtin = TwoLevelDrive::new(TwoLevelProtocol::General);
        for &t in &[0.0, 0.37, 1.1, 2.5, 3.9] {
            let dh = max_abs(&(&inline.hamiltonian(t) - &builtin.hamiltonian(t)));
            assert!(dh < 1e-14);
            let dhd = max_abs(
                &(&inline.hamiltonian_dot(t).unwrap() - &builtin.hamiltonian_dot(t).unwrap()),
            );
            assert!(dhd < 1e-14);
        }
    }

    #[test]
    fn builtin_scenarios_validate_and_carry_shared_parameters() {
        for tag in BUILTIN_TAGS {
            let cfg = ScenarioConfig::builtin(tag).unwrap();
            cfg.validate().unwrap();
            assert_abs_diff_eq!(cfg.beta, 1.0);
            assert_abs_diff_eq!(cfg.gamma0, 1.0);
            assert_abs_diff_eq!(cfg.dt, 1e-3);
            assert_abs_diff_eq!(cfg.t0, 0.0);
            match cfg.initial_state {
                InitialStateSpec::EnergyBasis {
                    p_plus,
                    rho_pm_re,
                    rho_pm_im,
                } => {
                    assert_abs_diff_eq!(p_plus, 0.3);
                    assert_abs_diff_eq!(rho_pm_re, 0.2);
                    assert_abs_diff_eq!(rho_pm_im, 0.1);
                }
                _ => panic!("builtin scenarios use energy-basis initial states"),
            }
        }
        assert_abs_diff_eq!(ScenarioConfig::builtin("fig1a").unwrap().t1, 4.0);
        assert_abs_diff_eq!(ScenarioConfig::builtin("fig1b").unwrap().t1, 2.8);
        assert_abs_diff_eq!(ScenarioConfig::builtin("fig1c").unwrap().t1, 4.0);
        assert!(ScenarioConfig::builtin("fig1d").is_err());
    }

    #[test]
    fn builtin_initial_state_matches_analytic_assembly() {
        let cfg = ScenarioConfig::builtin("fig1a").unwrap();
        let drive = cfg.build_drive().unwrap();
        let rho = cfg.build_initial_state(drive.as_ref()).unwrap();
        let reference = TwoLevelDrive::new(TwoLevelProtocol::General)
            .state_from_energy_basis(0.0, 0.3, c(0.2, 0.1))
            .unwrap();
        assert!(max_abs(&(&rho - &reference)) < 1e-14);
    }

    #[test]
    fn json_round_trip_with_inline_drive_and_matrix_state() {
        let src = r#"{
            "name": "custom",
            "drive": {"q": "sin(pi*t/2)", "delta": "cos(pi*t/2)"},
            "beta": 1.0,
            "gamma0": 0.5,
            "initial_state": {"matrix": [[[0.6, 0.0], [0.1, 0.05]],
                                          [[0.1, -0.05], [0.4, 0.0]]]},
            "t0": 0.0,
            "t1": 2.0,
            "dt": 0.002
        }"#;
        let cfg = ScenarioConfig::from_json(src).unwrap();
        assert_eq!(cfg.display_name(), "custom");
        let drive = cfg.build_drive().unwrap();
        let rho = cfg.build_initial_state(drive.as_ref()).unwrap();
        assert_abs_diff_eq!(trace(&rho).re, 1.0, epsilon = 1e-12);

        // Serialization survives a round trip.
        let text = serde_json::to_string(&cfg).unwrap();
        let back = ScenarioConfig::from_json(&text).unwrap();
        assert_eq!(back.display_name(), "custom");
        assert_abs_diff_eq!(back.gamma0, 0.5);
    }

    #[test]
    fn config_rejections() {
        // dt too coarse for the window.
        let mut cfg = ScenarioConfig::builtin("fig1a").unwrap();
        cfg.dt = 0.1;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));

        // Non-positive bath parameters.
        let mut cfg = ScenarioConfig::builtin("fig1a").unwrap();
        cfg.beta = -1.0;
        assert!(cfg.validate().is_err());

        // Unphysical energy-basis components.
        let mut cfg = ScenarioConfig::builtin("fig1a").unwrap();
        cfg.initial_state = InitialStateSpec::EnergyBasis {
            p_plus: 1.2,
            rho_pm_re: 0.0,
            rho_pm_im: 0.0,
        };
        assert!(cfg.validate().is_err());

        // Non-Hermitian matrix state.
        let mut cfg = ScenarioConfig::builtin("fig1a").unwrap();
        cfg.initial_state = InitialStateSpec::Matrix {
            matrix: vec![vec![[0.5, 0.0], [0.3, 0.0]], vec![[0.0, 0.0], [0.5, 0.0]]],
        };
        assert!(cfg.validate().is_err());

        // Unknown fields rejected.
        assert!(ScenarioConfig::from_json(
            r#"{"drive": "fig1a", "beta": 1.0, "gamma0": 1.0,
                "initial_state": {"p_plus": 0.3, "rho_pm_re": 0.0, "rho_pm_im": 0.0},
                "t0": 0.0, "t1": 4.0, "dt": 0.001, "bogus": 1}"#
        )
        .is_err());
    }

    #[test]
    fn absorption_scale_feeds_detailed_balance_defect() {
        let mut cfg = ScenarioConfig::builtin("fig1a").unwrap();
        cfg.absorption_scale = 1.01;
        cfg.validate().unwrap();
        let bath = cfg.bath();
        let defect = bath.detailed_balance_defect(1.0);
        assert_abs_diff_eq!(defect, 1.0 - 1.0 / 1.01, epsilon = 1e-12);
    }

    #[test]
    fn resolve_prefers_builtins_then_paths() {
        assert!(ScenarioConfig::resolve("fig1a").is_ok());
        assert!(ScenarioConfig::resolve("no-such-scenario").is_err());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("custom.json");
        let cfg = ScenarioConfig::builtin("fig1c").unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
        let loaded = ScenarioConfig::resolve(path.to_str().unwrap()).unwrap();
        assert_eq!(loaded.display_name(), "fig1c");
    }

    #[test]
    fn default_output_paths_derive_from_name() {
        let cfg = ScenarioConfig::builtin("fig1b").unwrap();
        assert_eq!(cfg.csv_path(), PathBuf::from("fig1b.csv"));
        assert_eq!(cfg.report_path(), PathBuf::from("fig1b_report.json"));
    }
}
