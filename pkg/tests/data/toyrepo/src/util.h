#pragma once

// Clamps value into the inclusive range [lo, hi].
inline int clamp(int value, int lo, int hi) {
    if (value < lo) {
        return lo;
    }
    if (value > hi) {
        return hi;
    }
    return value;
}

// Clamps value into [0, hi].
inline int clamp(int value, int hi) {
    return clamp(value, 0, hi);
}
