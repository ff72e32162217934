//! Free groups: reduced words, windows `W_d(k)`, Stallings foldings and
//! pseudo-subgroups.

mod pseudo;
mod stallings;
mod window;
mod word;

pub use pseudo::{
    closure, enumerate_pseudo_subgroups, is_pseudo_subgroup, pseudo_to_ball, stab_window, truncate as truncate_set,
    PseudoSubgroup, DEFAULT_PSEUDO_CAP,
};
pub use stallings::{stallings_membership, StallingsGraph};
pub use window::{window_size, Window, MAX_WINDOW_WORDS};
pub use word::{Letter, Word};
