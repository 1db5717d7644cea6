package com.shop.app;

import com.shop.core.Customer;
import java.util.Map;

public class Checkout {
    private Map<String, Integer> quantities;

    public void ship(Customer customer, String street, String city, String zip) {
        customer.relocate(street, city, zip);
    }

    public int pack(int width, int height, int depth, String label) {
        return width * height * depth;
    }

    enum Stage {
        OPEN, PAID, SHIPPED;

        private int code;
    }
}
