pub mod hardness;
pub mod simulate;
pub mod train;
