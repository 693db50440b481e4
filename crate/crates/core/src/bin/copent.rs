fn main() {
    std::process::exit(copent::cli::run(std::env::args_os()));
}
