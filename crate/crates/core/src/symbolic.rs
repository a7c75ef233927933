//! Finite words over `{1..m}`, cylinder index spaces and the shift action.
//!
//! Depth-`r` words are encoded base-`m` with the first symbol most
//! significant and symbol `1` mapped to digit `0`. With this layout
//! prepending a symbol and dropping the last one is a single division and
//! addition, which is what the transfer operator needs.

use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on the number of cells in a cylinder index space.
pub const MAX_CELLS: usize = 1 << 20;

/// Default depth cap for an alphabet of size `m`: 12 for a binary alphabet,
/// scaled down for larger alphabets so that `m^r` stays near `2^12`.
pub fn default_depth_cap(m: usize) -> usize {
    if m <= 2 {
        return 12;
    }
    ((12.0 * std::f64::consts::LN_2) / (m as f64).ln()).floor().max(1.0) as usize
}

/// A finite word `u_1 ... u_n` with symbols in `1..=m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolWord {
    symbols: Vec<usize>,
    alphabet: usize,
}

impl SymbolWord {
    pub fn new(symbols: Vec<usize>, alphabet: usize) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidInput("alphabet size must be positive".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s == 0 || s > alphabet) {
            return Err(Error::SymbolOutOfRange { symbol: s, alphabet });
        }
        Ok(Self { symbols, alphabet })
    }

    pub fn empty(alphabet: usize) -> Self {
        Self { symbols: Vec::new(), alphabet }
    }

    /// Parses a digit string such as `"1121"`.
    pub fn parse(digits: &str, alphabet: usize) -> Result<Self> {
        let symbols = digits
            .trim()
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::InvalidInput(format!("bad symbol {c:?} in word {digits:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols, alphabet)
    }

    /// The word `pattern` repeated until it has length `n`.
    pub fn periodic(pattern: &[usize], n: usize, alphabet: usize) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidInput("empty period".into()));
        }
        Self::new(pattern.iter().copied().cycle().take(n).collect(), alphabet)
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.symbols.first().copied()
    }

    /// `u|_n`; shorter words are returned unchanged.
    pub fn prefix(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self { symbols: self.symbols[..n].to_vec(), alphabet: self.alphabet }
    }

    /// `σ^k u`.
    pub fn shift(&self, k: usize) -> Self {
        let k = k.min(self.len());
        Self { symbols: self.symbols[k..].to_vec(), alphabet: self.alphabet }
    }

    /// `u|_n`, padding with the tail symbol `1` when `u` is too short.
    pub fn truncate_or_pad(&self, n: usize) -> Self {
        let mut symbols: Vec<usize> = self.symbols.iter().copied().take(n).collect();
        symbols.resize(n, 1);
        Self { symbols, alphabet: self.alphabet }
    }

    pub fn concat(&self, other: &SymbolWord) -> Self {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Self { symbols, alphabet: self.alphabet.max(other.alphabet) }
    }

    /// `i · u`.
    pub fn prepend(&self, symbol: usize) -> Result<Self> {
        if symbol == 0 || symbol > self.alphabet {
            return Err(Error::SymbolOutOfRange { symbol, alphabet: self.alphabet });
        }
        let mut symbols = Vec::with_capacity(self.len() + 1);
        symbols.push(symbol);
        symbols.extend_from_slice(&self.symbols);
        Ok(Self { symbols, alphabet: self.alphabet })
    }
}

impl fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alphabet <= 9 {
            for s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// The longest common prefix `u ∧ v`.
pub fn common_prefix(u: &SymbolWord, v: &SymbolWord) -> Result<SymbolWord> {
    if u.alphabet != v.alphabet {
        return Err(Error::InvalidInput(format!(
            "alphabets differ ({} vs {})",
            u.alphabet, v.alphabet
        )));
    }
    let n = u.symbols.iter().zip(&v.symbols).take_while(|(a, b)| a == b).count();
    Ok(u.prefix(n))
}

/// Bijection between depth-`r` words over `m` symbols and `[0, m^r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CylinderIndex {
    depth: usize,
    alphabet: usize,
    count: usize,
    /// `m^(r-1)`, the place value of the first symbol.
    lead: usize,
}

impl CylinderIndex {
    pub fn new(alphabet: usize, depth: usize) -> Result<Self> {
        if alphabet == 0 || depth == 0 {
            return Err(Error::InvalidInput("alphabet and depth must be positive".into()));
        }
        let count = checked_pow(alphabet, depth)
            .filter(|&c| c <= MAX_CELLS)
            .ok_or(Error::DepthCap { alphabet, depth, cap: MAX_CELLS })?;
        Ok(Self { depth, alphabet, count, lead: count / alphabet })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn encode(&self, word: &SymbolWord) -> Result<usize> {
        if word.len() != self.depth {
            return Err(Error::InvalidInput(format!(
                "word {word} has length {} but the index depth is {}",
                word.len(),
                self.depth
            )));
        }
        if word.alphabet() != self.alphabet {
            return Err(Error::InvalidInput("alphabet mismatch".into()));
        }
        Ok(word.symbols().iter().fold(0, |acc, &s| acc * self.alphabet + (s - 1)))
    }

    pub fn decode(&self, id: usize) -> Result<SymbolWord> {
        self.check(id)?;
        let mut symbols = vec![0; self.depth];
        let mut rest = id;
        for slot in symbols.iter_mut().rev() {
            *slot = rest % self.alphabet + 1;
            rest /= self.alphabet;
        }
        Ok(SymbolWord { symbols, alphabet: self.alphabet })
    }

    /// First symbol of the word with this id (1-based).
    pub fn first_symbol(&self, id: usize) -> usize {
        id / self.lead + 1
    }

    /// Id of `σw` inside the depth `r-1` index space.
    pub fn tail_id(&self, id: usize) -> usize {
        id % self.lead
    }

    /// Id of `(i·w)|_r`.
    pub fn prepend_id(&self, symbol: usize, id: usize) -> usize {
        (symbol - 1) * self.lead + id / self.alphabet
    }

    /// The `m` cylinders `(i·w)|_r`, one per symbol `i`.
    pub fn neighbors(&self, id: usize) -> Result<Vec<(usize, usize)>> {
        self.check(id)?;
        Ok((1..=self.alphabet).map(|i| (i, self.prepend_id(i, id))).collect())
    }

    /// The `m` words `w` with `(v_1·w)|_r = v`, i.e. the predecessors of `v`
    /// in the successor graph.
    pub fn predecessors(&self, id: usize) -> Result<Vec<usize>> {
        self.check(id)?;
        let base = (id % self.lead) * self.alphabet;
        Ok((0..self.alphabet).map(|k| base + k).collect())
    }

    fn check(&self, id: usize) -> Result<()> {
        if id >= self.count {
            Err(Error::WordIdOutOfRange { id, count: self.count })
        } else {
            Ok(())
        }
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}
