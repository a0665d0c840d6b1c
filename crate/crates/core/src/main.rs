fn main() {
    std::process::exit(darkcorpus::cli::main());
}
