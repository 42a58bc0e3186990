//! Wire types and a typed HTTP client for the rubric service.
//!
//! The service exposes grading, reward computation, rubric validation and
//! parsing, curation selection, and dataset analytics over HTTP/JSON.
//! [`wire`] defines the endpoint envelopes (domain types keep their own
//! JSON forms); [`ApiClient`] is a thin async client over them.

pub mod client;
pub mod wire;

pub use client::{ApiClient, ClientError};
pub use wire::{
    AgreementRequest, ApiError, BestOfNRequest, BestOfNResponse, DensityRequest, GradeRequest,
    Health, ParseRequest, ParseResponse, SelectRequest, SelectResponse, ValidateRequest,
    ValidateResponse,
};
