use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use super::{coeff, degenerate_subspace, Ame, FeTriple};

/// Nonzero coefficients of one `Ψ_klm` in floating point.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub state: Ame,
    pub entries: Vec<(FeTriple, Complex64)>,
}

/// `D_kl` on the shell `N = 2k + l`, dense, indexed by [`degenerate_subspace`].
#[derive(Clone, Debug)]
pub struct DMatrix {
    pub k: u32,
    pub l: u32,
    pub triples: Vec<FeTriple>,
    index: HashMap<FeTriple, usize>,
    values: Vec<Complex64>,
    /// Nonzero entries `(i, i', D(t_i, t_i'))`.
    pub nonzero: Vec<(usize, usize, Complex64)>,
}

impl DMatrix {
    fn build(k: u32, l: u32) -> Self {
        let triples = degenerate_subspace(2 * k + l);
        let d = triples.len();
        let index = triples.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let mut values = vec![Complex64::new(0.0, 0.0); d * d];
        let norm = 1.0 / f64::from(2 * l + 1);
        for m in -(l as i32)..=(l as i32) {
            let c: Vec<Complex64> = triples
                .iter()
                .map(|&t| coeff(Ame { k, l, m }, t).to_complex())
                .collect();
            for i in 0..d {
                if c[i].norm_sqr() == 0.0 {
                    continue;
                }
                for ip in 0..d {
                    values[i * d + ip] += c[ip].conj() * c[i] * norm;
                }
            }
        }
        let nonzero = (0..d)
            .flat_map(|i| (0..d).map(move |ip| (i, ip)))
            .filter_map(|(i, ip)| {
                let v = values[i * d + ip];
                (v.norm() > 1e-15).then_some((i, ip, v))
            })
            .collect();
        Self {
            k,
            l,
            triples,
            index,
            values,
            nonzero,
        }
    }

    /// `D(t, t')`; zero for triples outside the shell.
    pub fn get(&self, t: FeTriple, t_prime: FeTriple) -> Complex64 {
        match (self.index.get(&t), self.index.get(&t_prime)) {
            (Some(&i), Some(&ip)) => self.values[i * self.triples.len() + ip],
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

/// Memoized floating-point views of the exact coefficients.
///
/// Readers share a lock; an entry is inserted whole after it has been
/// computed outside the lock, so a reader sees either nothing or the full
/// value. Two threads racing on the same key compute it twice and keep the
/// first insertion.
#[derive(Default)]
pub struct CoeffCache {
    states: RwLock<HashMap<Ame, Arc<StateVector>>>,
    dmats: RwLock<HashMap<(u32, u32), Arc<DMatrix>>>,
}

impl CoeffCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static CoeffCache {
        static CACHE: OnceLock<CoeffCache> = OnceLock::new();
        CACHE.get_or_init(CoeffCache::new)
    }

    pub fn state_vector(&self, state: Ame) -> Arc<StateVector> {
        if let Some(v) = self
            .states
            .read()
            .expect("coefficient cache poisoned")
            .get(&state)
        {
            return Arc::clone(v);
        }
        let entries = degenerate_subspace(state.energy())
            .into_iter()
            .filter_map(|t| {
                let c = coeff(state, t);
                (!c.is_zero()).then(|| (t, c.to_complex()))
            })
            .collect();
        let built = Arc::new(StateVector { state, entries });
        let mut w = self.states.write().expect("coefficient cache poisoned");
        Arc::clone(w.entry(state).or_insert(built))
    }

    pub fn d_matrix(&self, k: u32, l: u32) -> Arc<DMatrix> {
        if let Some(v) = self
            .dmats
            .read()
            .expect("coefficient cache poisoned")
            .get(&(k, l))
        {
            return Arc::clone(v);
        }
        let built = Arc::new(DMatrix::build(k, l));
        let mut w = self.dmats.write().expect("coefficient cache poisoned");
        Arc::clone(w.entry((k, l)).or_insert(built))
    }
}
