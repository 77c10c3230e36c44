"""Data models for parameters, reports and configuration."""
