package shop;

public class Order extends Entity {
    private Customer customer;
    private Cart cart;
    private boolean paid;

    public Order(Customer customer, Cart cart) {
        this.customer = customer;
        this.cart = cart;
        customer.addOrder(this);
    }

    public double total() {
        return cart.total();
    }

    public void pay(PaymentService service) {
        if (!paid) {
            paid = service.charge(customer.getEmail(), total());
        }
    }

    public boolean isPaid() { return paid; }
}
