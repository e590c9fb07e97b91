//! Audio input and serialization of grids, curves and tables.

mod grid_io;
mod wav;

pub use grid_io::{
    grid_to_csv, grid_to_pgm, parse_grid_csv, pixel_value, read_grid_csv, write_grid_csv,
    write_grid_pgm, write_json,
};
pub use wav::{parse_wav, read_wav, AudioBuffer};
