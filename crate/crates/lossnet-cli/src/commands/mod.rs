pub mod design;
pub mod enumerate;
pub mod fixed_points;
pub mod integrate;
pub mod kelly;
pub mod scan_phi;
pub mod simulate;
