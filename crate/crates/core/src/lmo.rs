//! p-adic valuations and the per-prime combination of lens-space differences.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::{self, Q};
use crate::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest `k` with `p^k | n`.
pub fn nu_p(n: u64, p: u64) -> Result<u32> {
    if n < 1 {
        return Err(Error::Domain("valuation needs n ≥ 1".into()));
    }
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let (mut n, mut k) = (n, 0);
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    Ok(k)
}

/// Prime factors of `n` with multiplicity, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut k = 0;
        while n % d == 0 {
            n /= d;
            k += 1;
        }
        if k > 0 {
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Per-prime differences, keyed by prime. Serialised as `{"p": "a/b"}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, String>", into = "BTreeMap<String, String>")]
pub struct DeltaTable(BTreeMap<u64, Q>);

impl DeltaTable {
    pub fn new(entries: BTreeMap<u64, Q>) -> Result<Self> {
        if let Some(p) = entries.keys().find(|&&p| !is_prime(p)) {
            return Err(Error::Domain(format!("table key {p} is not prime")));
        }
        Ok(Self(entries))
    }

    pub fn get(&self, p: u64) -> Option<&Q> {
        self.0.get(&p)
    }

    pub fn entries(&self) -> &BTreeMap<u64, Q> {
        &self.0
    }
}

impl TryFrom<BTreeMap<String, String>> for DeltaTable {
    type Error = Error;
    fn try_from(m: BTreeMap<String, String>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (k, v) in m {
            let p: u64 = k.trim().parse().map_err(|_| Error::Invalid(format!("table key {k:?} is not an integer")))?;
            out.insert(p, rational::parse(&v)?);
        }
        Self::new(out)
    }
}

impl From<DeltaTable> for BTreeMap<String, String> {
    fn from(t: DeltaTable) -> Self {
        t.0.iter().map(|(p, d)| (p.to_string(), rational::to_string(d))).collect()
    }
}

/// `Σ_p table[p] · ν_p(h1_order)`.
pub fn lmo_kkt_delta(h1_order: u64, table: &DeltaTable) -> Result<Q> {
    if h1_order < 1 {
        return Err(Error::Domain("|H_1| must be at least 1".into()));
    }
    let factors = factorize(h1_order);
    let missing: Vec<u64> = factors.iter().map(|&(p, _)| p).filter(|p| table.get(*p).is_none()).collect();
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(u64::to_string).collect();
        return Err(Error::Precondition(format!("table has no entry for prime(s) {}", list.join(", "))));
    }
    Ok(factors.iter().fold(Q::zero(), |acc, &(p, k)| acc + table.get(p).expect("checked") * Q::from_integer(k.into())))
}
