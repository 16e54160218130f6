pub mod features;
pub mod kv;
pub mod mcp_data;
pub mod models;
pub mod pipeline;
pub mod score;
pub mod synth;
