package com.shop.core;

public interface Shape {
    double volume(int width, int height, int depth);
}
