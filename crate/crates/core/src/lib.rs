pub mod logic;
pub mod model;
pub mod parser;
pub mod scoring;
pub mod validator;
