use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

/// Atomic level of the V-type atom. The derived ordering `C < A < B` is the
/// basis ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Ground state `|c>`.
    C,
    /// Excited state `|a>`, coupled to the sigma+ modes.
    A,
    /// Excited state `|b>`, coupled to the sigma- modes.
    B,
}

impl Atom {
    pub const ALL: [Atom; 3] = [Atom::C, Atom::A, Atom::B];

    pub fn is_excited(self) -> bool {
        self != Atom::C
    }
}

/// Circular polarization branch; also selects the atomic transition
/// (`Plus`: a <-> c, `Minus`: b <-> c).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::Plus, Branch::Minus];

    /// The excited level this branch connects to the ground state.
    pub fn excited_level(self) -> Atom {
        match self {
            Branch::Plus => Atom::A,
            Branch::Minus => Atom::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cavity {
    One,
    Two,
}

/// One of the four cavity modes. The discriminant is the position in
/// [`BasisState::occupations`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    OnePlus = 0,
    OneMinus = 1,
    TwoPlus = 2,
    TwoMinus = 3,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::OnePlus, Mode::OneMinus, Mode::TwoPlus, Mode::TwoMinus];

    pub fn new(cavity: Cavity, branch: Branch) -> Self {
        match (cavity, branch) {
            (Cavity::One, Branch::Plus) => Mode::OnePlus,
            (Cavity::One, Branch::Minus) => Mode::OneMinus,
            (Cavity::Two, Branch::Plus) => Mode::TwoPlus,
            (Cavity::Two, Branch::Minus) => Mode::TwoMinus,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn cavity(self) -> Cavity {
        match self {
            Mode::OnePlus | Mode::OneMinus => Cavity::One,
            Mode::TwoPlus | Mode::TwoMinus => Cavity::Two,
        }
    }

    pub fn branch(self) -> Branch {
        match self {
            Mode::OnePlus | Mode::TwoPlus => Branch::Plus,
            Mode::OneMinus | Mode::TwoMinus => Branch::Minus,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::OnePlus => "1+",
            Mode::OneMinus => "1-",
            Mode::TwoPlus => "2+",
            Mode::TwoMinus => "2-",
        })
    }
}

/// Product state `|atom> (x) |n1+, n1-, n2+, n2->`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState {
    pub atom: Atom,
    /// Photon numbers in mode order `(1+, 1-, 2+, 2-)`.
    pub occupations: [u32; 4],
}

impl BasisState {
    pub const fn new(atom: Atom, occupations: [u32; 4]) -> Self {
        Self { atom, occupations }
    }

    /// Ground atom, all modes empty.
    pub const fn vacuum() -> Self {
        Self::new(Atom::C, [0; 4])
    }

    pub fn photons(&self) -> u32 {
        self.occupations.iter().sum()
    }

    pub fn photons_in(&self, cavity: Cavity) -> u32 {
        match cavity {
            Cavity::One => self.occupations[0] + self.occupations[1],
            Cavity::Two => self.occupations[2] + self.occupations[3],
        }
    }

    /// Total excitation number: photons plus one if the atom is excited.
    pub fn excitation(&self) -> u32 {
        self.photons() + u32::from(self.atom.is_excited())
    }

    pub fn occupation(&self, mode: Mode) -> u32 {
        self.occupations[mode.index()]
    }

    pub fn with_atom(mut self, atom: Atom) -> Self {
        self.atom = atom;
        self
    }

    /// Removes one photon from `mode`, or `None` if it is empty.
    pub fn lowered(mut self, mode: Mode) -> Option<Self> {
        let n = &mut self.occupations[mode.index()];
        if *n == 0 {
            return None;
        }
        *n -= 1;
        Some(self)
    }

    pub fn raised(mut self, mode: Mode) -> Self {
        self.occupations[mode.index()] += 1;
        self
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atom = match self.atom {
            Atom::C => 'c',
            Atom::A => 'a',
            Atom::B => 'b',
        };
        let [p1, m1, p2, m2] = self.occupations;
        write!(f, "|{atom};{p1},{m1},{p2},{m2}>")
    }
}

/// Every [`BasisState`] with total excitation at most `n_max`.
///
/// Ordering is lexicographic on `(atom, n1+, n1-, n2+, n2-)` with atom order
/// `c < a < b`, so the vacuum is always index 0. Output files index states in
/// this order.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    n_max: u32,
    states: Vec<BasisState>,
    lookup: BTreeMap<BasisState, usize>,
}

impl Basis {
    pub fn build(n_max: u32) -> Self {
        let mut states = Vec::new();
        for atom in Atom::ALL {
            let budget = match n_max.checked_sub(u32::from(atom.is_excited())) {
                Some(b) => b,
                None => continue,
            };
            for n1p in 0..=budget {
                for n1m in 0..=budget - n1p {
                    for n2p in 0..=budget - n1p - n1m {
                        for n2m in 0..=budget - n1p - n1m - n2p {
                            states.push(BasisState::new(atom, [n1p, n1m, n2p, n2m]));
                        }
                    }
                }
            }
        }
        let lookup = states.iter().enumerate().map(|(k, s)| (*s, k)).collect();
        Self { n_max, states, lookup }
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, index: usize) -> &BasisState {
        &self.states[index]
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.lookup.get(state).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BasisState)> {
        self.states.iter().enumerate()
    }
}
