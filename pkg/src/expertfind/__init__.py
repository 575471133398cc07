"""expertfind: expert / non-expert / out-of-scope comment
classification and user profiling for Q&A communities."""

__version__ = "0.1.0"
