//! C ABI for the emulator (work in progress).
