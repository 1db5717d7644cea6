package com.shop.core;

import java.util.ArrayList;
import java.util.List;

public class Customer {
    private String name;
    private String street;
    private String city;
    private String zip;
    private List<String> tags = new ArrayList<>();

    public void relocate(String street, String city, String zip) {
        this.street = street;
        this.city = city;
        this.zip = zip;
    }

    public void rename(String name) {
        this.name = name;
    }
}
