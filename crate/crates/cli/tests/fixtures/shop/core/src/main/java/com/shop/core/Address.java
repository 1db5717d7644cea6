package com.shop.core;

/** A postal address. */
public final class Address {
    private final String street;
    private final String city;
    private final String zip;

    public Address(String street, String city, String zip) {
        this.street = street;
        this.city = city;
        this.zip = zip;
    }

    public String getStreet() {
        return street;
    }

    @Override
    public String toString() {
        return street + ", " + zip + " " + city;
    }
}
