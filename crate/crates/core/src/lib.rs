pub mod eigen;
pub mod meanfield;
pub mod oracle;
pub mod ruling;
pub mod spinops;
pub mod sweep;
