//! Perfect simulation of the infinite-volume measure on a finite window:
//! backward clan of ancestors, forward cleaning, read-off at time 0.

mod clan;
mod clean;

pub use clan::{relates, sample_backward_clan, ti, Caps, Clan, ClanOptions, Domain, Origin};
pub use clean::{clean_clan, perfect_sample, perfect_samples, sample_cleaned_clan, CleanedClan, PerfectSample};
