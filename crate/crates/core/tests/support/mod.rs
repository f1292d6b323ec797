#![allow(dead_code, clippy::needless_range_loop)]
pub mod dispatch_grid;
pub mod identity;
pub mod model_oracle;
pub mod random_lp;
pub mod vertex_oracle;
