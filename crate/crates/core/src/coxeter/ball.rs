use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::{CoxeterSystem, Mat};
use crate::error::{Error, Result};

/// Index of an element inside a [`Ball`].
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementId(pub u32);

impl ElementId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A group element: its matrix on `V` in the basis of simple roots, its length
/// and one reduced word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub matrix: Mat,
    pub length: usize,
    pub word: Vec<usize>,
}

struct BruhatData {
    /// `down[y]` is the bitset of `{x : x <= y}`.
    down: Vec<Vec<u64>>,
    covers: Vec<Vec<ElementId>>,
}

/// All elements of length at most `max_length`, found breadth first.
pub struct Ball {
    system: Arc<CoxeterSystem>,
    max_length: usize,
    elements: Vec<GroupElement>,
    index: HashMap<Mat, ElementId>,
    right: Vec<Vec<Option<ElementId>>>,
    left: Vec<Vec<Option<ElementId>>>,
    inverse: Vec<ElementId>,
    bruhat: OnceLock<BruhatData>,
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ball")
            .field("rank", &self.system.rank())
            .field("max_length", &self.max_length)
            .field("size", &self.elements.len())
            .finish()
    }
}

/// Enumerates every element of length `<= max_length` exactly once.
pub fn enumerate_ball(system: &Arc<CoxeterSystem>, max_length: usize) -> Ball {
    let r = system.rank();
    let identity = GroupElement {
        matrix: Mat::identity(r),
        length: 0,
        word: Vec::new(),
    };
    let mut elements = vec![identity];
    let mut index = HashMap::new();
    index.insert(elements[0].matrix.clone(), ElementId(0));
    let mut right: Vec<Vec<Option<ElementId>>> = vec![vec![None; r]];
    let mut frontier = vec![ElementId(0)];
    for len in 0..max_length {
        let mut next = Vec::new();
        for &w in &frontier {
            for s in 0..r {
                let m = elements[w.index()].matrix.mul(system.simple_reflection(s));
                let id = match index.get(&m) {
                    Some(&id) => id,
                    None => {
                        let id = ElementId(elements.len() as u32);
                        let mut word = elements[w.index()].word.clone();
                        word.push(s);
                        index.insert(m.clone(), id);
                        elements.push(GroupElement {
                            matrix: m,
                            length: len + 1,
                            word,
                        });
                        right.push(vec![None; r]);
                        next.push(id);
                        id
                    }
                };
                right[w.index()][s] = Some(id);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    // Right products of the outermost layer that stay inside the ball.
    for w in 0..elements.len() {
        for s in 0..r {
            if right[w][s].is_none() {
                let m = elements[w].matrix.mul(system.simple_reflection(s));
                right[w][s] = index.get(&m).copied();
            }
        }
    }
    let left = (0..elements.len())
        .map(|w| {
            (0..r)
                .map(|s| {
                    let m = system.simple_reflection(s).mul(&elements[w].matrix);
                    index.get(&m).copied()
                })
                .collect()
        })
        .collect();
    let inverse = elements
        .iter()
        .map(|e| {
            let rev: Vec<usize> = e.word.iter().rev().copied().collect();
            *index
                .get(&system.word_matrix(&rev))
                .expect("inverse has the same length")
        })
        .collect();
    Ball {
        system: system.clone(),
        max_length,
        elements,
        index,
        right,
        left,
        inverse,
        bruhat: OnceLock::new(),
    }
}

impl Ball {
    pub fn system(&self) -> &Arc<CoxeterSystem> {
        &self.system
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> {
        (0..self.elements.len() as u32).map(ElementId)
    }

    pub fn identity(&self) -> ElementId {
        ElementId(0)
    }

    pub fn element(&self, id: ElementId) -> &GroupElement {
        &self.elements[id.index()]
    }

    pub fn length(&self, id: ElementId) -> usize {
        self.elements[id.index()].length
    }

    pub fn word(&self, id: ElementId) -> &[usize] {
        &self.elements[id.index()].word
    }

    pub fn format(&self, id: ElementId) -> String {
        self.system.format_word(self.word(id))
    }

    /// Whether the ball is the whole (finite) group.
    pub fn is_complete(&self) -> bool {
        self.right.iter().all(|row| row.iter().all(Option::is_some))
    }

    pub fn lookup(&self, m: &Mat) -> Option<ElementId> {
        self.index.get(m).copied()
    }

    /// Element represented by an arbitrary (not necessarily reduced) word.
    pub fn from_word(&self, word: &[usize]) -> Result<ElementId> {
        let m = self.system.word_matrix(word);
        self.lookup(&m).ok_or(Error::BallExhausted {
            max_length: self.max_length,
        })
    }

    pub fn parse(&self, text: &str) -> Result<ElementId> {
        let w = self.system.parse_word(text)?;
        self.from_word(&w)
    }

    /// `w * s`, if it lies in the ball.
    pub fn mul_right(&self, w: ElementId, s: usize) -> Result<ElementId> {
        self.right[w.index()][s].ok_or(Error::BallExhausted {
            max_length: self.max_length,
        })
    }

    /// `s * w`, if it lies in the ball.
    pub fn mul_left(&self, s: usize, w: ElementId) -> Result<ElementId> {
        self.left[w.index()][s].ok_or(Error::BallExhausted {
            max_length: self.max_length,
        })
    }

    pub fn inverse(&self, w: ElementId) -> ElementId {
        self.inverse[w.index()]
    }

    /// Matrix of `a * b^{-1}` (which need not lie in the ball).
    pub fn quotient_matrix(&self, a: ElementId, b: ElementId) -> Mat {
        self.element(a)
            .matrix
            .mul(&self.element(self.inverse(b)).matrix)
    }

    fn bruhat(&self) -> &BruhatData {
        self.bruhat.get_or_init(|| {
            let n = self.elements.len();
            let words = n.div_ceil(64);
            let mut by_len: Vec<Vec<ElementId>> = vec![Vec::new(); self.max_length + 2];
            for id in self.ids() {
                by_len[self.length(id)].push(id);
            }
            let mut covers = vec![Vec::new(); n];
            let mut down = vec![vec![0u64; words]; n];
            for len in 0..by_len.len() {
                for &y in &by_len[len] {
                    let mut bits = vec![0u64; words];
                    bits[y.index() / 64] |= 1 << (y.index() % 64);
                    if len > 0 {
                        for &x in &by_len[len - 1] {
                            if self.quotient_matrix(y, x).is_reflection() {
                                covers[y.index()].push(x);
                                for (b, d) in bits.iter_mut().zip(&down[x.index()]) {
                                    *b |= d;
                                }
                            }
                        }
                    }
                    down[y.index()] = bits;
                }
            }
            BruhatData { down, covers }
        })
    }

    /// `x <= y` in the Bruhat order: the reflexive-transitive closure of covers
    /// `x ⋖ y`, meaning `l(y) = l(x) + 1` and `y x^{-1}` is a reflection.
    pub fn bruhat_leq(&self, x: ElementId, y: ElementId) -> bool {
        let d = &self.bruhat().down[y.index()];
        d[x.index() / 64] >> (x.index() % 64) & 1 == 1
    }

    /// Elements covered by `y`.
    pub fn covers(&self, y: ElementId) -> &[ElementId] {
        &self.bruhat().covers[y.index()]
    }

    /// `{y : y <= x}` sorted by length, then id.
    pub fn lower_interval(&self, x: ElementId) -> Vec<ElementId> {
        let mut v: Vec<ElementId> = self.ids().filter(|&y| self.bruhat_leq(y, x)).collect();
        v.sort_by_key(|&y| (self.length(y), y));
        v
    }
}
