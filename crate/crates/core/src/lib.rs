pub mod concdom;
pub mod algebra;
pub mod hornsat;
pub mod interpolate;
pub mod normalize;
pub mod oracle;
pub mod pipeline;
pub mod reduce;
pub mod syntax;
