//! The composed wiretap code: detection layer, evasive layer, list-decodable
//! layer, plus parameter documents and feasibility checks.
//!
//! Encoding takes d message blocks over F_{q^mu}, authenticates them with a
//! fresh detection key, zero-pads the base-field coordinates to the evasive
//! input length, maps them onto the evasive set point s, appends u*rho_r*N
//! uniform filler coefficients a, and transmits the folded Reed-Solomon
//! codeword of (s || a).  The filler coefficients are what an adversary
//! reading rho_r*N symbols sees as fresh randomness: every read set of that
//! size exposes u*rho_r*N evaluations, and the corresponding coefficient
//! columns form an invertible (scaled Vandermonde) square matrix, so the
//! view is uniform whatever the secret.  Decoding runs the list decoder,
//! intersects the projected candidate space with the evasive set, strips
//! padding, and accepts only a uniquely verifying detection codeword.

use crate::amd::{AmdError, AmdParams};
use crate::evasive::{EvasiveError, EvasiveSystem};
use crate::fields::{ExtElem, ExtField, FieldError, PrimeField};
use crate::frs::{FrsCodeword, FrsError, FrsParams, ReceivedWord};
use num_rational::Ratio;
use rand::Rng;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type AwtpCodeword = FrsCodeword;

#[derive(Debug, Error)]
pub enum AwtpError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Detection(#[from] AmdError),
    #[error(transparent)]
    Evasive(#[from] EvasiveError),
    #[error(transparent)]
    Frs(#[from] FrsError),
    #[error("w = {w} must equal v*v = {expected}")]
    WrongBlockWidth { w: usize, expected: usize },
    #[error("{which} fraction {value} must lie in [0, 1]")]
    RhoOutOfRange { which: &'static str, value: String },
    #[error("{which} budget {value} is not an integer number of symbols")]
    BudgetNotIntegral { which: &'static str, value: String },
    #[error("payload needs {need} coordinates but the evasive layer carries {have}")]
    PayloadTooLarge { need: usize, have: usize },
    #[error("secret plus filler need {k} coefficients, the code fits {max}")]
    FillerOverflow { k: usize, max: usize },
    #[error("message must be {d} blocks of {mu} coordinates")]
    MessageShape { d: usize, mu: usize },
    #[error("message coordinate {0} outside the field")]
    CoordOutOfField(u64),
    #[error("bad bound argument: {0}")]
    BadBoundArgument(String),
}

/// Exact nonnegative rational, written "a/b" or as a bare integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac(pub Ratio<u64>);

impl Frac {
    pub fn new(num: u64, den: u64) -> Self {
        Frac(Ratio::new(num, den))
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl std::str::FromStr for Frac {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: u64 = num.parse().map_err(|e| format!("bad numerator: {e}"))?;
        let den: u64 = den.parse().map_err(|e| format!("bad denominator: {e}"))?;
        if den == 0 {
            return Err("zero denominator".into());
        }
        Ok(Frac(Ratio::new(num, den)))
    }
}

impl std::fmt::Display for Frac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Frac {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if *self.0.denom() == 1 {
            s.serialize_u64(*self.0.numer())
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Frac {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct FracVisitor;
        impl Visitor<'_> for FracVisitor {
            type Value = Frac;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a rational like \"1/6\" or a nonnegative integer")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Frac, E> {
                s.parse().map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, n: u64) -> Result<Frac, E> {
                Ok(Frac(Ratio::from_integer(n)))
            }
            fn visit_i64<E: de::Error>(self, n: i64) -> Result<Frac, E> {
                u64::try_from(n)
                    .map(|n| Frac(Ratio::from_integer(n)))
                    .map_err(|_| E::custom("negative fraction"))
            }
        }
        d.deserialize_any(FracVisitor)
    }
}

/// Parameter document.  Keys: q, u, v, N, mu, d, w, b, rho_r, rho_w, seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AwtpConfig {
    pub q: u64,
    pub u: usize,
    pub v: usize,
    #[serde(rename = "N")]
    pub n_sym: usize,
    pub mu: usize,
    pub d: usize,
    pub w: usize,
    pub b: usize,
    pub rho_r: Frac,
    pub rho_w: Frac,
    pub seed: u64,
}

impl AwtpConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Validated parameter set with all derived subsystems.
#[derive(Debug, Clone)]
pub struct AwtpParams {
    config: AwtpConfig,
    field: PrimeField,
    ext: ExtField,
    amd: AmdParams,
    evasive: EvasiveSystem,
    frs: FrsParams,
    read_budget: usize,
    write_budget: usize,
}

fn budget(rho: Frac, n_sym: usize, which: &'static str) -> Result<usize, AwtpError> {
    let r = rho.ratio();
    if r > Ratio::from_integer(1) {
        return Err(AwtpError::RhoOutOfRange {
            which,
            value: rho.to_string(),
        });
    }
    let scaled = r * Ratio::from_integer(n_sym as u64);
    if !scaled.is_integer() {
        return Err(AwtpError::BudgetNotIntegral {
            which,
            value: format!("{rho} * {n_sym}"),
        });
    }
    Ok(scaled.to_integer() as usize)
}

impl AwtpParams {
    pub fn new(config: AwtpConfig) -> Result<Self, AwtpError> {
        let field = PrimeField::new(config.q)?;
        let ext = ExtField::new(field, config.mu)?;
        if config.w != config.v * config.v {
            return Err(AwtpError::WrongBlockWidth {
                w: config.w,
                expected: config.v * config.v,
            });
        }
        let evasive = EvasiveSystem::build(field, config.v, config.b)?;
        let amd = AmdParams::new(ext.clone(), config.d)?;
        if amd.coord_len() > evasive.input_len() {
            return Err(AwtpError::PayloadTooLarge {
                need: amd.coord_len(),
                have: evasive.input_len(),
            });
        }
        let read_budget = budget(config.rho_r, config.n_sym, "read")?;
        let write_budget = budget(config.rho_w, config.n_sym, "write")?;
        let k = evasive.ambient() + config.u * read_budget;
        let max = config.u * config.n_sym;
        if k > max {
            return Err(AwtpError::FillerOverflow { k, max });
        }
        let frs = FrsParams::new(field, config.u, config.n_sym, k, config.v)?;
        Ok(AwtpParams {
            config,
            field,
            ext,
            amd,
            evasive,
            frs,
            read_budget,
            write_budget,
        })
    }

    pub fn config(&self) -> &AwtpConfig {
        &self.config
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ext(&self) -> &ExtField {
        &self.ext
    }

    pub fn detection(&self) -> &AmdParams {
        &self.amd
    }

    pub fn evasive(&self) -> &EvasiveSystem {
        &self.evasive
    }

    pub fn frs(&self) -> &FrsParams {
        &self.frs
    }

    /// Secret coefficient count n = w b.
    pub fn secret_len(&self) -> usize {
        self.evasive.ambient()
    }

    /// Filler coefficient count u * rho_r * N.
    pub fn filler_len(&self) -> usize {
        self.frs.dimension() - self.secret_len()
    }

    pub fn read_budget(&self) -> usize {
        self.read_budget
    }

    pub fn write_budget(&self) -> usize {
        self.write_budget
    }

    /// Message rate d*mu / (u*N).
    pub fn rate(&self) -> Ratio<u64> {
        message_rate(
            self.config.d,
            self.config.mu,
            self.config.u,
            self.config.n_sym,
        )
    }

    pub fn check(&self) -> FeasibilityReport {
        let mut items = Vec::new();
        let n_sym = self.config.n_sym;
        let t = self.frs.agreement_threshold();
        items.push(CheckItem {
            name: "agreement threshold within symbol count".into(),
            pass: t <= n_sym,
            detail: format!("threshold {t}, symbols {n_sym}"),
            operative: true,
        });
        let radius = self.frs.decoding_radius();
        items.push(CheckItem {
            name: "decoding radius covers the write budget".into(),
            pass: radius.is_some_and(|r| self.write_budget <= r),
            detail: format!(
                "radius {}, write budget {}",
                radius.map_or("none".into(), |r| r.to_string()),
                self.write_budget
            ),
            operative: true,
        });
        items.push(CheckItem {
            name: "filler spans the read exposure".into(),
            pass: self.filler_len() == self.config.u * self.read_budget,
            detail: format!(
                "filler {}, exposure {}",
                self.filler_len(),
                self.config.u * self.read_budget
            ),
            operative: true,
        });
        let (asym_pass, asym_detail) = self.asymptotic_condition();
        items.push(CheckItem {
            name: "asymptotic list-size condition (informational)".into(),
            pass: asym_pass,
            detail: asym_detail,
            operative: false,
        });
        let operative_ok = items.iter().filter(|i| i.operative).all(|i| i.pass);
        let asymptotic_ok = asym_pass;
        FeasibilityReport {
            items,
            operative_ok,
            asymptotic_ok,
        }
    }

    // rho_w < v/(v+1) - (v/(v+1)) * ((v/(v-1))(uR+3) + u rho_r) / (u-v+1)
    // with uR = d mu / N, evaluated exactly.
    fn asymptotic_condition(&self) -> (bool, String) {
        type R = Ratio<i128>;
        let r = |a: usize, b: usize| R::new(a as i128, b as i128);
        let v = self.config.v;
        let u = self.config.u;
        let u_rate = r(self.config.d * self.config.mu, self.config.n_sym);
        let inner = r(v, v - 1) * (u_rate + R::from_integer(3))
            + R::from_integer(u as i128) * r(self.read_budget, self.config.n_sym);
        let rhs = r(v, v + 1) * (R::from_integer(1) - inner / R::from_integer((u - v + 1) as i128));
        let lhs = r(self.write_budget, self.config.n_sym);
        (
            lhs < rhs,
            format!("write fraction {lhs} vs admissible bound {rhs}"),
        )
    }

    fn check_message(&self, message: &[ExtElem]) -> Result<(), AwtpError> {
        let (d, mu) = (self.config.d, self.config.mu);
        if message.len() != d || message.iter().any(|b| b.len() != mu) {
            return Err(AwtpError::MessageShape { d, mu });
        }
        for block in message {
            if let Some(&c) = block.iter().find(|&&c| c >= self.config.q) {
                return Err(AwtpError::CoordOutOfField(c));
            }
        }
        Ok(())
    }

    /// Message blocks from flat base-field coordinates.
    pub fn message_from_coords(&self, coords: &[u64]) -> Result<Vec<ExtElem>, AwtpError> {
        let (d, mu) = (self.config.d, self.config.mu);
        if coords.len() != d * mu {
            return Err(AwtpError::MessageShape { d, mu });
        }
        let msg: Vec<ExtElem> = coords.chunks(mu).map(|c| c.to_vec()).collect();
        self.check_message(&msg)?;
        Ok(msg)
    }

    pub fn message_to_coords(&self, message: &[ExtElem]) -> Vec<u64> {
        message.iter().flatten().copied().collect()
    }

    pub fn encode<R: Rng + ?Sized>(
        &self,
        message: &[ExtElem],
        rng: &mut R,
    ) -> Result<AwtpCodeword, AwtpError> {
        Ok(self.encode_traced(message, rng)?.0)
    }

    /// Encode and expose every intermediate stage for auditing.
    pub fn encode_traced<R: Rng + ?Sized>(
        &self,
        message: &[ExtElem],
        rng: &mut R,
    ) -> Result<(AwtpCodeword, EncodeTrace), AwtpError> {
        self.check_message(message)?;
        let amd_codeword = self.amd.encode(message, rng)?;
        let mut padded = self.amd.flatten(&amd_codeword);
        padded.resize(self.evasive.input_len(), 0);
        let set_point = self.evasive.encode(&padded)?;
        let filler: Vec<u64> = (0..self.filler_len())
            .map(|_| self.field.uniform(rng))
            .collect();
        let mut coeffs = set_point.clone();
        coeffs.extend_from_slice(&filler);
        let codeword = self.frs.encode(&coeffs)?;
        Ok((
            codeword,
            EncodeTrace {
                amd_codeword,
                padded,
                set_point,
                filler,
                coeffs,
            },
        ))
    }

    pub fn decode(&self, y: &ReceivedWord) -> Result<DecodeOutcome, AwtpError> {
        Ok(self.decode_traced(y)?.0)
    }

    pub fn decode_traced(
        &self,
        y: &ReceivedWord,
    ) -> Result<(DecodeOutcome, DecodeStats), AwtpError> {
        let (valid, stats) = self.candidates(y)?;
        let outcome = match valid.len() {
            0 => DecodeOutcome::NoCandidate,
            1 => DecodeOutcome::Message(valid.into_iter().next().unwrap()),
            n => DecodeOutcome::Ambiguous { candidates: n },
        };
        Ok((outcome, stats))
    }

    /// Always guess: any verifying candidate, picked uniformly when several
    /// survive, None only when the list is empty.
    pub fn decode_forced<R: Rng + ?Sized>(
        &self,
        y: &ReceivedWord,
        rng: &mut R,
    ) -> Result<Option<Vec<ExtElem>>, AwtpError> {
        let (valid, _) = self.candidates(y)?;
        Ok(match valid.len() {
            0 => None,
            n => Some(valid.into_iter().nth(rng.random_range(0..n)).unwrap()),
        })
    }

    fn candidates(&self, y: &ReceivedWord) -> Result<(Vec<Vec<ExtElem>>, DecodeStats), AwtpError> {
        let Some(space) = self.frs.list_decode(y)? else {
            return Ok((
                Vec::new(),
                DecodeStats {
                    list_dim: None,
                    set_hits: 0,
                    valid: 0,
                },
            ));
        };
        let projected = space.truncate(self.secret_len());
        let points = self.evasive.intersect(&projected)?;
        let set_hits = points.len();
        let mut valid = Vec::new();
        for point in points {
            let padded = self.evasive.decode(&point)?;
            let (amd_part, padding) = padded.split_at(self.amd.coord_len());
            if padding.iter().any(|&c| c != 0) {
                continue;
            }
            let cw = self.amd.unflatten(amd_part)?;
            if let Some(msg) = self.amd.verify(&cw) {
                valid.push(msg);
            }
        }
        let stats = DecodeStats {
            list_dim: Some(projected.dim()),
            set_hits,
            valid: valid.len(),
        };
        Ok((valid, stats))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    Message(Vec<ExtElem>),
    Ambiguous { candidates: usize },
    NoCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeStats {
    /// Dimension of the projected list space, None when the list was empty.
    pub list_dim: Option<usize>,
    /// Evasive-set points on the list space.
    pub set_hits: usize,
    /// Candidates that passed padding and detection checks.
    pub valid: usize,
}

#[derive(Debug, Clone)]
pub struct EncodeTrace {
    pub amd_codeword: crate::amd::AmdCodeword,
    pub padded: Vec<u64>,
    pub set_point: Vec<u64>,
    pub filler: Vec<u64>,
    pub coeffs: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    /// Operative checks gate usability; the rest are informational.
    pub operative: bool,
}

#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub items: Vec<CheckItem>,
    pub operative_ok: bool,
    pub asymptotic_ok: bool,
}

/// d*mu / (u*N).
pub fn message_rate(d: usize, mu: usize, u: usize, n_sym: usize) -> Ratio<u64> {
    Ratio::new((d * mu) as u64, (u * n_sym) as u64)
}

/// Upper bound on achievable rate against an adversary reading a rho_r
/// fraction and rewriting a rho_w fraction, at secrecy slack eps over the
/// given alphabet: 1 - rho_r - rho_w + 2 eps rho_r (1 + log_|S| 1/eps).
pub fn capacity_bound(
    rho_r: f64,
    rho_w: f64,
    eps: f64,
    alphabet: u64,
) -> Result<f64, AwtpError> {
    for (name, v) in [("rho_r", rho_r), ("rho_w", rho_w)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(AwtpError::BadBoundArgument(format!("{name} = {v}")));
        }
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(AwtpError::BadBoundArgument(format!("eps = {eps}")));
    }
    if eps == 0.0 {
        return Ok(1.0 - (rho_r + rho_w));
    }
    if alphabet < 2 {
        return Err(AwtpError::BadBoundArgument(format!(
            "alphabet size {alphabet} needs at least two symbols"
        )));
    }
    let log_term = (1.0 / eps).log2() / (alphabet as f64).log2();
    Ok(1.0 - (rho_r + rho_w) + 2.0 * eps * rho_r * (1.0 + log_term))
}
