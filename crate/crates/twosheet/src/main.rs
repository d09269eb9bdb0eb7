fn main() {
    std::process::exit(twosheet::run());
}
