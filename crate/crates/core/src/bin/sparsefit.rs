fn main() {
    std::process::exit(sparsefit::cli::run(std::env::args_os()));
}
