fn main() {
    std::process::exit(onebit_cli::cli_main(std::env::args_os()));
}
