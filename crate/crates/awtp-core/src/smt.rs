//! One-round secure message transmission over N wires, by carrying one
//! codeword symbol per wire.
//!
//! An adversary corrupting at most t wires (reading and replacing the same
//! set) is exactly the restricted channel with read and write budgets t, so
//! a code built for equal read and write fractions wraps directly: send is
//! encode with wire i carrying symbol i, receive is decode.  The per-wire
//! alphabet is F_q^u.

use crate::awtp::{AwtpError, AwtpParams, DecodeOutcome};
use crate::fields::ExtElem;
use crate::frs::ReceivedWord;
use num_rational::Ratio;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("wire wrapping needs equal read and write fractions, got {rho_r} and {rho_w}")]
    NotRestricted { rho_r: String, rho_w: String },
    #[error("bound outside its domain: {0}")]
    DomainError(String),
    #[error("expected {wires} wires of {width} coordinates")]
    PacketShape { wires: usize, width: usize },
    #[error(transparent)]
    Pipeline(#[from] AwtpError),
}

/// A 1-round symmetric protocol over N wires tolerating t corrupted wires.
#[derive(Debug, Clone)]
pub struct SmtProtocol {
    params: AwtpParams,
}

impl SmtProtocol {
    pub fn from_awtp(params: AwtpParams) -> Result<Self, SmtError> {
        let cfg = params.config();
        if cfg.rho_r != cfg.rho_w {
            return Err(SmtError::NotRestricted {
                rho_r: cfg.rho_r.to_string(),
                rho_w: cfg.rho_w.to_string(),
            });
        }
        Ok(SmtProtocol { params })
    }

    pub fn params(&self) -> &AwtpParams {
        &self.params
    }

    pub fn wires(&self) -> usize {
        self.params.config().n_sym
    }

    /// Corrupted-wire tolerance t.
    pub fn threshold(&self) -> usize {
        self.params.read_budget()
    }

    /// Per-wire alphabet size q^u.
    pub fn alphabet_size(&self) -> u128 {
        let q = self.params.field().order() as u128;
        q.checked_pow(self.params.config().u as u32)
            .expect("wire alphabet fits in u128")
    }

    /// Wire packets: packet i is codeword symbol i.
    pub fn send<R: Rng + ?Sized>(
        &self,
        message: &[ExtElem],
        rng: &mut R,
    ) -> Result<Vec<Vec<u64>>, SmtError> {
        Ok(self.params.encode(message, rng)?.symbols)
    }

    pub fn receive(&self, packets: &[Vec<u64>]) -> Result<DecodeOutcome, SmtError> {
        let width = self.params.config().u;
        let q = self.params.field().order();
        if packets.len() != self.wires()
            || packets.iter().any(|p| p.len() != width)
            || packets.iter().flatten().any(|&x| x >= q)
        {
            return Err(SmtError::PacketShape {
                wires: self.wires(),
                width,
            });
        }
        let word = ReceivedWord {
            symbols: packets.to_vec(),
        };
        Ok(self.params.decode(&word)?)
    }

    /// Symbols transmitted per message symbol: the reciprocal of the rate.
    pub fn transmission_rate(&self) -> Ratio<u64> {
        let rate = self.params.rate();
        Ratio::new(*rate.denom(), *rate.numer())
    }
}

/// Smallest possible transmission rate of any 1-round symmetric protocol
/// over n wires tolerating t corruptions at secrecy slack eps:
/// n / (n - 2t + 2 t eps (1 + log_alphabet(1/eps))); eps = 0 needs n > 2t
/// and reduces to n / (n - 2t).
pub fn smt_lower_bound(
    n_wires: usize,
    t: usize,
    eps: f64,
    alphabet_size: u128,
) -> Result<f64, SmtError> {
    if n_wires == 0 {
        return Err(SmtError::DomainError("no wires".into()));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(SmtError::DomainError(format!("eps = {eps} outside [0, 1)")));
    }
    let n = n_wires as f64;
    if eps == 0.0 {
        if n_wires <= 2 * t {
            return Err(SmtError::DomainError(format!(
                "perfect secrecy needs n > 2t, got n = {n_wires}, t = {t}"
            )));
        }
        return Ok(n / (n - 2.0 * t as f64));
    }
    if alphabet_size < 2 {
        return Err(SmtError::DomainError(format!(
            "alphabet size {alphabet_size} needs at least two symbols"
        )));
    }
    let log_term = (1.0 / eps).ln() / (alphabet_size as f64).ln();
    let denom = n - 2.0 * t as f64 + 2.0 * t as f64 * eps * (1.0 + log_term);
    if denom <= 0.0 {
        return Err(SmtError::DomainError(format!(
            "denominator {denom} not positive"
        )));
    }
    Ok(n / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::awtp::{AwtpConfig, Frac};
    use crate::channel::{Action, Adversary, ChannelSpec, View};
    use crate::frs::FrsCodeword;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn restricted_config() -> AwtpConfig {
        AwtpConfig {
            q: 37,
            u: 6,
            v: 2,
            n_sym: 6,
            mu: 1,
            d: 2,
            w: 4,
            b: 2,
            rho_r: Frac::new(1, 6),
            rho_w: Frac::new(1, 6),
            seed: 7,
        }
    }

    fn protocol() -> SmtProtocol {
        SmtProtocol::from_awtp(AwtpParams::new(restricted_config()).unwrap()).unwrap()
    }

    #[test]
    fn wrapping_requires_equal_fractions() {
        let mut cfg = restricted_config();
        cfg.rho_w = Frac::new(1, 3);
        let p = AwtpParams::new(cfg).unwrap();
        assert!(matches!(
            SmtProtocol::from_awtp(p),
            Err(SmtError::NotRestricted { .. })
        ));
        let s = protocol();
        assert_eq!(s.wires(), 6);
        assert_eq!(s.threshold(), 1);
        assert_eq!(s.alphabet_size(), 37u128.pow(6));
    }

    #[test]
    fn transmission_rate_is_reciprocal_of_code_rate() {
        let s = protocol();
        assert_eq!(s.transmission_rate(), Ratio::new(18, 1));
        assert_eq!(s.transmission_rate() * s.params().rate(), Ratio::new(1, 1));
    }

    #[test]
    fn send_receive_roundtrip_with_threshold_corruptions() {
        let s = protocol();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let f = s.params().field();
        for _ in 0..30 {
            let msg = vec![
                s.params().ext().uniform(&mut rng),
                s.params().ext().uniform(&mut rng),
            ];
            let mut packets = s.send(&msg, &mut rng).unwrap();
            assert_eq!(s.receive(&packets).unwrap(), DecodeOutcome::Message(msg.clone()));
            // replace t = 1 wire outright
            let wire = rng.random_range(0..6);
            packets[wire] = (0..6).map(|_| f.uniform(&mut rng)).collect();
            assert_eq!(s.receive(&packets).unwrap(), DecodeOutcome::Message(msg));
        }
    }

    #[test]
    fn packet_shape_is_checked() {
        let s = protocol();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let msg = vec![vec![1], vec![2]];
        let packets = s.send(&msg, &mut rng).unwrap();
        assert!(matches!(
            s.receive(&packets[..5]),
            Err(SmtError::PacketShape { wires: 6, width: 6 })
        ));
        let mut bad = packets.clone();
        bad[0].push(0);
        assert!(s.receive(&bad).is_err());
        let mut big = packets;
        big[0][0] = 37;
        assert!(s.receive(&big).is_err());
    }

    // Replacing a wire is the same channel action as adding the difference:
    // the restricted adversary reads the wire, writes new - old, and the
    // transcript shows exactly the replaced word.
    #[test]
    fn wire_replacement_matches_additive_error() {
        struct Replacer {
            wire: usize,
            replacement: Vec<u64>,
            step: usize,
        }
        impl Adversary for Replacer {
            fn act(&mut self, view: &View) -> Action {
                self.step += 1;
                match self.step {
                    1 => Action::Read(self.wire),
                    2 => {
                        let (_, old) = &view.reads[0];
                        let f = view.field;
                        let delta: Vec<u64> = self
                            .replacement
                            .iter()
                            .zip(old)
                            .map(|(&new, &c)| f.sub(new, c))
                            .collect();
                        Action::Write {
                            pos: self.wire,
                            delta,
                        }
                    }
                    _ => Action::Done,
                }
            }
        }
        let s = protocol();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let msg = vec![vec![9], vec![30]];
        let packets = s.send(&msg, &mut rng).unwrap();
        let spec = ChannelSpec::from_params(s.params(), true).unwrap();
        let replacement: Vec<u64> = vec![3, 1, 4, 1, 5, 9];
        let mut adv = Replacer {
            wire: 2,
            replacement: replacement.clone(),
            step: 0,
        };
        let cw = FrsCodeword {
            symbols: packets.clone(),
        };
        let tr = spec.transmit(&cw, &mut adv).unwrap();
        let mut replaced = packets;
        replaced[2] = replacement;
        assert_eq!(tr.delivered.symbols, replaced);
        assert_eq!(tr.capability_set(), std::collections::BTreeSet::from([2]));
        assert!(tr.error.iter().enumerate().all(|(j, e)| (j == 2)
            || e.iter().all(|&x| x == 0)));
        assert_eq!(s.receive(&tr.delivered.symbols).unwrap(), DecodeOutcome::Message(msg));
    }

    #[test]
    fn permuting_wires_and_inverting_preserves_outcomes() {
        let s = protocol();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for trial in 0..20 {
            let msg = vec![
                s.params().ext().uniform(&mut rng),
                s.params().ext().uniform(&mut rng),
            ];
            let mut packets = s.send(&msg, &mut rng).unwrap();
            if trial % 2 == 1 {
                // also corrupt one wire to exercise the nontrivial path
                packets[trial % 6] = vec![1, 2, 3, 4, 5, 6];
            }
            let baseline = s.receive(&packets).unwrap();
            let perm: Vec<usize> = {
                let mut idx: Vec<usize> = (0..6).collect();
                for i in (1..6).rev() {
                    idx.swap(i, rng.random_range(0..=i));
                }
                idx
            };
            let shuffled: Vec<Vec<u64>> = (0..6).map(|i| packets[perm[i]].clone()).collect();
            let mut unshuffled = vec![Vec::new(); 6];
            for (i, packet) in shuffled.into_iter().enumerate() {
                unshuffled[perm[i]] = packet;
            }
            assert_eq!(s.receive(&unshuffled).unwrap(), baseline);
        }
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(smt_lower_bound(5, 2, 0.0, 2).unwrap(), 5.0);
        assert_eq!(smt_lower_bound(7, 3, 0.0, 2).unwrap(), 7.0);
        assert_eq!(smt_lower_bound(6, 0, 0.0, 2).unwrap(), 1.0);
        assert_eq!(smt_lower_bound(6, 1, 0.0, 2).unwrap(), 1.5);
        // slack eases the bound
        let tight = smt_lower_bound(5, 2, 0.0, 1 << 16).unwrap();
        let eased = smt_lower_bound(5, 2, 0.01, 1 << 16).unwrap();
        assert!(eased < tight);
        assert!(matches!(
            smt_lower_bound(4, 2, 0.0, 2),
            Err(SmtError::DomainError(_))
        ));
        assert!(smt_lower_bound(5, 2, 1.0, 2).is_err());
        assert!(smt_lower_bound(5, 2, 0.5, 1).is_err());
        assert!(smt_lower_bound(0, 0, 0.0, 2).is_err());
    }

    #[test]
    fn constructed_protocol_beats_the_bound() {
        let s = protocol();
        let bound = smt_lower_bound(s.wires(), s.threshold(), 0.0, s.alphabet_size()).unwrap();
        let rate = s.transmission_rate();
        let rate_f = *rate.numer() as f64 / *rate.denom() as f64;
        assert!(rate_f >= bound, "{rate_f} vs {bound}");
    }
}
